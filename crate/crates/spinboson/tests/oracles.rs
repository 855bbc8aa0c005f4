//! Independent numerical oracles for the spectral machinery: a fixed-step
//! RK4 integration of the Schrödinger equation, the projection identity
//! for the effective operator, the weak-coupling expansion, and direct
//! reconstruction of `B` from its block spectrum.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinboson::evolve::{survival_probability, Propagator, StateVector};
use spinboson::linalg::ComplexMatrix;
use spinboson::model::{build_hamiltonian, ModelParams, Spin};
use spinboson::special::{bath_spectrum, build_b_effective};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Integrates `dU/dt = -i H U` from the identity with classic RK4.
fn rk4_propagator(h: &ComplexMatrix, t_final: f64, dt: f64) -> ComplexMatrix {
    let n = h.rows();
    let rhs = |u: &ComplexMatrix| -> ComplexMatrix {
        let hu = h.mul(u).unwrap();
        ComplexMatrix::from_fn(n, n, |i, j| hu[(i, j)] * c(0.0, -1.0))
    };
    let steps = (t_final / dt).round() as usize;
    let mut u = ComplexMatrix::identity(n);
    for _ in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&add_scaled(&u, &k1, dt / 2.0));
        let k3 = rhs(&add_scaled(&u, &k2, dt / 2.0));
        let k4 = rhs(&add_scaled(&u, &k3, dt));
        u = ComplexMatrix::from_fn(n, n, |i, j| {
            u[(i, j)]
                + (k1[(i, j)] + (k2[(i, j)] + k3[(i, j)]) * c(2.0, 0.0) + k4[(i, j)])
                    * c(dt / 6.0, 0.0)
        });
    }
    u
}

fn add_scaled(a: &ComplexMatrix, b: &ComplexMatrix, s: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] + b[(i, j)] * c(s, 0.0))
}

#[test]
fn spectral_propagator_matches_rk4_integration() {
    let params = ModelParams {
        cutoff: 8,
        ..ModelParams::default()
    };
    let h = build_hamiltonian(&params).unwrap();
    let exact = Propagator::new(&h, params.hbar)
        .unwrap()
        .matrix(params.time)
        .unwrap();
    let integrated = rk4_propagator(h.matrix(), params.time, 1e-5);
    let defect = exact.max_abs_diff(&integrated).unwrap();
    assert!(defect <= 1e-8, "propagator vs RK4: {defect:.3e}");
}

#[test]
fn expectation_of_b_is_the_survival_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for cutoff in [4usize, 8, 16] {
        let params = ModelParams {
            cutoff,
            ..ModelParams::default()
        };
        let b = build_b_effective(&params).unwrap();
        for trial in 0..10 {
            let mut amps: Vec<Complex64> = (0..cutoff)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let bath = StateVector::from_amplitudes(amps).unwrap();
            let direct = survival_probability(&params, &bath, &[params.time])
                .unwrap()
                .pr_up()[0];
            let via_b = b.expectation(&bath).unwrap();
            assert!(
                (direct - via_b).abs() <= 1e-10,
                "cutoff {cutoff} trial {trial}: {direct} vs {via_b}"
            );
        }
    }
}

#[test]
fn weak_coupling_decay_follows_beta_t_squared() {
    // To lowest order the vacuum's decay probability after a short time is
    // (β t)²; the energy mismatch only enters at relative order (ΔE t)².
    let params = ModelParams {
        cutoff: 16,
        time: 1e-3,
        ..ModelParams::default()
    };
    let prop = Propagator::for_params(&params).unwrap();
    let mut amps = vec![c(0.0, 0.0); 32];
    amps[0] = c(1.0, 0.0);
    let psi = StateVector::from_amplitudes(amps).unwrap();
    let evolved = prop.apply(&psi, params.time).unwrap();
    let decay = evolved.spin_weight(Spin::Down, 16).unwrap();
    let predicted = (params.beta * params.time).powi(2);
    assert!(
        (decay - predicted).abs() <= 0.05 * predicted,
        "decay {decay:.6e} vs (βt)² = {predicted:.6e}"
    );
}

#[test]
fn block_spectrum_reconstructs_b() {
    let params = ModelParams {
        cutoff: 12,
        ..ModelParams::default()
    };
    let b = build_b_effective(&params).unwrap();
    let spectrum = bath_spectrum(&b).unwrap();
    let v = spectrum.eigenvectors();
    let mut vl = v.clone();
    let factors: Vec<Complex64> = spectrum.eigenvalues().iter().map(|&l| c(l, 0.0)).collect();
    vl.scale_columns(&factors).unwrap();
    let rebuilt = vl.mul(&v.adjoint()).unwrap();
    let scale = b.matrix().matrix().max_abs().max(1e-300);
    let defect = rebuilt.max_abs_diff(b.matrix().matrix()).unwrap();
    assert!(defect <= 1e-10 * scale, "reconstruction defect {defect:.3e}");
}

#[test]
fn survival_of_vacuum_stays_near_one_at_the_reference_time() {
    // not a pinned value, just a sanity corridor: weak coupling for a
    // short time removes little probability
    let params = ModelParams {
        cutoff: 32,
        ..ModelParams::default()
    };
    let bath = StateVector::vacuum(32).unwrap();
    let pr = survival_probability(&params, &bath, &[params.time])
        .unwrap()
        .pr_up()[0];
    assert!(pr > 0.95 && pr <= 1.0 + 1e-10, "Pr(up) = {pr}");
}
