//! Property suite: randomized and grid-based invariants that go beyond the
//! per-module unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use privcap::bound::{
    bb84_ampdamp_decomposition, bb84_threshold, bb84_upper_bound, decomposition_cost, linspace,
    lower_convex_envelope, pauli_upper_bound, CostOptions, Decomposition,
};
use privcap::capacity::{f_amp, q1_optimize, q1_two_kraus};
use privcap::certify::{
    certify_antidegradable, certify_degradable, verify_certificate, CertifyOptions,
};
use privcap::channel::{choi_distance, Channel, DensityMatrix};
use privcap::info::{coherent_information, private_information, CqEnsemble};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ----------------------------------------------------------------------------
// envelope properties
// ----------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_stays_below_points_and_convex(
        raw in prop::collection::vec((0.0f64..100.0, -5.0f64..5.0), 3..40)
    ) {
        let mut pts = raw;
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
        prop_assume!(pts.len() >= 2);
        let env = lower_convex_envelope(&pts).unwrap();
        for &(x, y) in &pts {
            prop_assert!(env.eval(x).unwrap() <= y + 1e-9);
        }
        let v = env.vertices();
        for w in v.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            prop_assert!(s2 >= s1 - 1e-9);
        }
    }

    #[test]
    fn two_kraus_value_symmetries(gamma in 0.0f64..=1.0, delta in 0.0f64..=1.0) {
        let v = q1_two_kraus(gamma, delta).unwrap().value;
        let swapped = q1_two_kraus(delta, gamma).unwrap().value;
        let reflected = q1_two_kraus(1.0 - gamma, 1.0 - delta).unwrap().value;
        prop_assert!((v - swapped).abs() <= 1e-9, "{v} vs swap {swapped}");
        prop_assert!((v - reflected).abs() <= 1e-9, "{v} vs reflection {reflected}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn choi_distance_is_a_metric(
        pa in (0.0f64..0.3, 0.0f64..0.3, 0.0f64..0.3),
        tk in (0.0f64..=1.0, 0.0f64..=1.0),
        g in 0.0f64..=1.0,
    ) {
        let a = Channel::pauli(pa.0, pa.1, pa.2).unwrap();
        let b = Channel::two_kraus(tk.0, tk.1).unwrap();
        let c = Channel::amplitude_damping(g).unwrap();
        let dab = choi_distance(&a, &b).unwrap();
        let dba = choi_distance(&b, &a).unwrap();
        let dac = choi_distance(&a, &c).unwrap();
        let dbc = choi_distance(&b, &c).unwrap();
        prop_assert!((dab - dba).abs() <= 1e-12);
        prop_assert!(choi_distance(&a, &a).unwrap() <= 1e-14);
        prop_assert!(dac <= dab + dbc + 1e-12);
        prop_assert!(dab >= 0.0);
    }
}

// ----------------------------------------------------------------------------
// certification dichotomy
// ----------------------------------------------------------------------------

/// Every two-Kraus qubit channel is degradable or antidegradable; on a full
/// parameter grid at least one certificate must come back, and it must hold
/// up under independent re-verification.
#[test]
fn two_kraus_grid_always_certifies() {
    let opts = CertifyOptions {
        tol: 1e-5,
        ..CertifyOptions::default()
    };
    let n = 20;
    for i in 0..n {
        for j in 0..n {
            let gamma = i as f64 / (n - 1) as f64;
            let delta = j as f64 / (n - 1) as f64;
            let c = Channel::two_kraus(gamma, delta).unwrap();
            let deg = certify_degradable(&c, &opts).unwrap();
            let cert = if deg.is_certified() {
                deg.certificate.unwrap()
            } else {
                let anti = certify_antidegradable(&c, &opts).unwrap();
                assert!(
                    anti.is_certified(),
                    "({gamma:.3}, {delta:.3}): neither direction certified \
                     (deg residual {:.2e}, anti residual {:.2e})",
                    deg.best_residual,
                    anti.best_residual
                );
                anti.certificate.unwrap()
            };
            let res = verify_certificate(&c, &cert).unwrap();
            assert!(res <= 1e-5, "({gamma:.3}, {delta:.3}): residual {res:.2e}");
        }
    }
}

// ----------------------------------------------------------------------------
// decomposition cost invariances
// ----------------------------------------------------------------------------

#[test]
fn cost_invariant_under_permutation_and_split() {
    let base = bb84_ampdamp_decomposition(0.1).unwrap();
    let opts = CostOptions::default();
    let cost = decomposition_cost(&base, &opts).unwrap();

    let mut permuted = base.clone();
    permuted.parts.reverse();
    let cost_perm = decomposition_cost(&permuted, &opts).unwrap();
    assert!((cost - cost_perm).abs() <= 1e-12);

    let mut split = Decomposition {
        target: base.target.clone(),
        parts: Vec::new(),
    };
    let mut half = base.parts[0].clone();
    half.prob /= 2.0;
    split.parts.push(half.clone());
    split.parts.push(half);
    split.parts.push(base.parts[1].clone());
    let cost_split = decomposition_cost(&split, &opts).unwrap();
    assert!((cost - cost_split).abs() <= 1e-12);
}

// ----------------------------------------------------------------------------
// curve-level invariants
// ----------------------------------------------------------------------------

#[test]
fn bb84_envelope_monotone_and_below_pauli_bound() {
    let grid = linspace(0.0, 0.25, 2001);
    let curve = bb84_upper_bound(&grid).unwrap();
    let q_star = bb84_threshold();
    for w in curve.samples.windows(2) {
        assert!(
            w[1].envelope <= w[0].envelope + 1e-12,
            "increase at q = {}",
            w[1].x
        );
    }
    for s in &curve.samples {
        let q = s.x;
        let pauli = pauli_upper_bound(q * (1.0 - q), q * q, q * (1.0 - q)).unwrap();
        assert!(s.envelope <= pauli + 1e-12, "q = {q}");
        for c in &s.components {
            assert!(s.envelope <= c + 1e-12);
        }
        if q >= q_star {
            assert_eq!(s.envelope, 0.0);
        }
    }
    for w in curve.samples.windows(3) {
        let second = w[2].envelope - 2.0 * w[1].envelope + w[0].envelope;
        assert!(second >= -1e-9);
    }
}

// ----------------------------------------------------------------------------
// processing and additivity at the second anchor value
// ----------------------------------------------------------------------------

fn rand_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let gram = &g * g.adjoint();
    let tr: f64 = (0..d).map(|i| gram[(i, i)].re).sum();
    DensityMatrix::new(gram.scale(1.0 / tr)).unwrap()
}

#[test]
fn processing_never_helps_weak_damping() {
    let c = Channel::amplitude_damping(0.1).unwrap();
    let cap = f_amp(0.1).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(2..=4usize);
        let mut probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        let states: Vec<DensityMatrix> = (0..n).map(|_| rand_state(2, &mut rng)).collect();
        let t_len = rng.gen_range(2..=4usize);
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let col: Vec<f64> = (0..t_len).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let z: f64 = col.iter().sum();
                col.into_iter().map(|v| v / z).collect()
            })
            .collect();
        let rows: Vec<Vec<f64>> = (0..t_len)
            .map(|t| cols.iter().map(|col| col[t]).collect())
            .collect();
        let ens = CqEnsemble::new(probs, states, Some(rows)).unwrap();
        let pi = private_information(&c, &ens).unwrap();
        assert!(pi <= cap + 1e-6, "private information {pi} beats {cap}");
    }
}

#[test]
fn two_copy_additivity_weak_damping() {
    let single = f_amp(0.1).unwrap();
    let c = Channel::amplitude_damping(0.1).unwrap();
    let two = c.tensor(&c).unwrap();
    let opt = q1_optimize(&two, 20, 1e-6, 5).unwrap();
    assert!(opt.value <= 2.0 * single.value + 1e-4);
    let t = single.argument;
    let mut rho1 = DMatrix::zeros(2, 2);
    rho1[(0, 0)] = Complex64::new(1.0 - t, 0.0);
    rho1[(1, 1)] = Complex64::new(t, 0.0);
    let product = DensityMatrix::new(rho1.kronecker(&rho1)).unwrap();
    let ci = coherent_information(&two, &product).unwrap();
    assert!((ci - 2.0 * single.value).abs() <= 1e-6);
}
