//! Runs every code block in the guide as a doc-test. mdbook renders the
//! chapters but cannot test them against real dependencies, so this crate
//! includes each chapter verbatim and lets `cargo test --doc` do the work;
//! the Markdown in `book/src` stays the single copy. One module per
//! chapter, so a failing test names the chapter it came from.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/evolution.md")]
pub mod evolution {}

#[doc = include_str!("../../../book/src/special-states.md")]
pub mod special_states {}

#[doc = include_str!("../../../book/src/studies.md")]
pub mod studies {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}
