//! Single-letter capacity values: closed forms for the named channel
//! families, a golden-section maximizer for the two-parameter qubit family,
//! a multi-restart coherent-information maximizer for everything else, and a
//! bisection threshold finder.

use crate::channel::{Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::info::binary_entropy;
use crate::linalg::{cre, zeros, CMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default input-dimension cap for `q1_optimize`.
pub const Q1_OPTIMIZE_DIM_CAP: usize = 8;

/// Result of a scalar maximization over t in [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct OptResult {
    /// Maximum found, clamped below at zero.
    pub value: f64,
    /// Maximizing t.
    pub argument: f64,
    /// Objective evaluations spent.
    pub iterations: u32,
    /// Whether the bracket shrank below the requested width.
    pub tolerance_met: bool,
}

/// Result of the multi-restart coherent-information maximizer.
#[derive(Debug, Clone)]
pub struct Q1Result {
    /// Best coherent information found, clamped below at zero.
    pub value: f64,
    /// Input state achieving it.
    pub input: DensityMatrix,
    /// Total ascent iterations across restarts.
    pub iterations: u32,
    /// Whether the two best restarts agree within the requested tolerance.
    pub tolerance_met: bool,
}

const GOLDEN_TOL: f64 = 1e-9;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of a unimodal objective on [lo, hi].
fn golden_max(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> OptResult {
    let mut a = lo;
    let mut b = hi;
    let mut iterations = 2u32;
    let mut x1 = b - (b - a) * INV_PHI;
    let mut x2 = a + (b - a) * INV_PHI;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol && iterations < 400 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * INV_PHI;
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * INV_PHI;
            f1 = f(x1);
        }
        iterations += 1;
    }
    let (argument, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    OptResult {
        value,
        argument,
        iterations,
        tolerance_met: b - a <= tol,
    }
}

/// Maximizes over [0, 1] with a coarse bracketing scan before the
/// golden-section refinement; the scan protects against the unimodality
/// assumption failing quietly.
fn scan_then_golden(f: &dyn Fn(f64) -> f64) -> OptResult {
    const SCAN: usize = 64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let t = i as f64 / SCAN as f64;
        let v = f(t);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 {
        0.0
    } else {
        (best_i - 1) as f64 / SCAN as f64
    };
    let hi = if best_i == SCAN {
        1.0
    } else {
        (best_i + 1) as f64 / SCAN as f64
    };
    let mut r = golden_max(f, lo, hi, GOLDEN_TOL);
    r.iterations += SCAN as u32 + 1;
    if best_v > r.value {
        r.value = best_v;
        r.argument = best_i as f64 / SCAN as f64;
    }
    r
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Capacity of the two-parameter qubit family:
/// max_t H(t(1-γ) + (1-t)δ) - H(tγ + (1-t)δ), clamped below at zero.
/// A clamped value of zero means the channel is antidegradable there.
pub fn q1_two_kraus(gamma: f64, delta: f64) -> Result<OptResult> {
    check_unit("gamma", gamma)?;
    check_unit("delta", delta)?;
    let f =
        move |t: f64| h2(t * (1.0 - gamma) + (1.0 - t) * delta) - h2(t * gamma + (1.0 - t) * delta);
    let mut r = scan_then_golden(&f);
    r.value = r.value.max(0.0);
    Ok(r)
}

/// Amplitude-damping capacity f(γ) = max_t H(t(1-γ)) - H(tγ), zero for
/// γ >= 1/2.
pub fn f_amp(gamma: f64) -> Result<OptResult> {
    q1_two_kraus(gamma, 0.0)
}

/// Dephasing capacity 1 - H(p).
pub fn cp_dephasing(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(1.0 - binary_entropy(p)?)
}

/// Erasure capacity (1 - 2p) log2 d, clamped below at zero.
pub fn cp_erasure(p: f64, d: usize) -> Result<f64> {
    check_unit("p", p)?;
    if d < 2 {
        return Err(Error::DimensionMismatch(
            "erasure capacity needs d >= 2".into(),
        ));
    }
    Ok(((1.0 - 2.0 * p) * (d as f64).log2()).max(0.0))
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::ParamOutOfRange { name, value });
    }
    Ok(())
}

// ============================================================================
// heuristic coherent-information maximizer
// ============================================================================

/// Number of real parameters in the lower-triangular factor of a d × d state.
fn param_len(d: usize) -> usize {
    d * d
}

/// Builds ρ = LL†/Tr(LL†) from the packed parameter vector: real diagonal
/// first, then (re, im) pairs of the strict lower triangle, column-major.
fn params_to_state(v: &[f64], d: usize) -> DensityMatrix {
    let mut l = zeros(d, d);
    for i in 0..d {
        l[(i, i)] = cre(v[i]);
    }
    let mut idx = d;
    for j in 0..d {
        for i in (j + 1)..d {
            l[(i, j)] = Complex64::new(v[idx], v[idx + 1]);
            idx += 2;
        }
    }
    let m = &l * crate::linalg::dagger(&l);
    let tr = crate::linalg::trace(&m).re;
    if tr < 1e-300 {
        return DensityMatrix::maximally_mixed(d);
    }
    DensityMatrix::new_unchecked(m.scale(1.0 / tr))
}

fn state_to_params(m: &CMat, d: usize) -> Vec<f64> {
    // Cholesky-like square root via eigendecomposition; only used for seeds,
    // where m is diagonal, so keep it simple: sqrt of diagonal entries
    let mut v = vec![0.0; param_len(d)];
    for i in 0..d {
        v[i] = m[(i, i)].re.max(0.0).sqrt();
    }
    v
}

struct Ascent {
    value: f64,
    params: Vec<f64>,
    iterations: u32,
}

fn ascend(c: &Channel, comp: &Channel, mut params: Vec<f64>, d: usize, tol: f64) -> Ascent {
    let eval = |v: &[f64]| -> f64 {
        let rho = params_to_state(v, d);
        let out = c.apply(&rho).expect("dims fixed");
        let env = comp.apply(&rho).expect("dims fixed");
        crate::info::entropy(&out) - crate::info::entropy(&env)
    };
    let n = params.len();
    let mut value = eval(&params);
    let mut iterations = 0u32;
    let fd_h = 1e-6;
    let mut step = 0.25;
    for _ in 0..400 {
        iterations += 1;
        // central-difference gradient
        let mut grad = vec![0.0; n];
        let mut gnorm2 = 0.0;
        for k in 0..n {
            let orig = params[k];
            params[k] = orig + fd_h;
            let fp = eval(&params);
            params[k] = orig - fd_h;
            let fm = eval(&params);
            params[k] = orig;
            grad[k] = (fp - fm) / (2.0 * fd_h);
            gnorm2 += grad[k] * grad[k];
        }
        if gnorm2.sqrt() < 1e-10 {
            break;
        }
        // backtracking line search along the gradient
        let mut improved = false;
        let mut s = step;
        for _ in 0..40 {
            let trial: Vec<f64> = params
                .iter()
                .zip(grad.iter())
                .map(|(p, g)| p + s * g)
                .collect();
            let tv = eval(&trial);
            if tv > value + 1e-4 * s * gnorm2 {
                let gain = tv - value;
                params = trial;
                value = tv;
                improved = true;
                step = (s * 2.0).min(1.0);
                if gain < tol * 1e-3 {
                    return Ascent {
                        value,
                        params,
                        iterations,
                    };
                }
                break;
            }
            s *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ascent {
        value,
        params,
        iterations,
    }
}

/// Maximizes coherent information over input states by multi-restart
/// finite-difference gradient ascent on ρ = LL†/Tr(LL†).
///
/// Restart seeds: the maximally mixed state, each basis state, then random
/// lower-triangular factors drawn from the seeded generator. Results are
/// deterministic for a fixed (channel, restarts, tol, seed) tuple regardless
/// of thread count.
pub fn q1_optimize(c: &Channel, restarts: usize, tol: f64, seed: u64) -> Result<Q1Result> {
    let d = c.din();
    if d > Q1_OPTIMIZE_DIM_CAP {
        return Err(Error::DimensionTooLarge {
            dim: d,
            cap: Q1_OPTIMIZE_DIM_CAP,
        });
    }
    let restarts = restarts.max(1);
    let comp = c.complementary();
    let mut seeds: Vec<Vec<f64>> = Vec::with_capacity(restarts);
    seeds.push(state_to_params(
        DensityMatrix::maximally_mixed(d).matrix(),
        d,
    ));
    for i in 0..d {
        if seeds.len() == restarts {
            break;
        }
        seeds.push(state_to_params(
            DensityMatrix::basis_state(d, i).matrix(),
            d,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while seeds.len() < restarts {
        let v: Vec<f64> = (0..param_len(d)).map(|_| rng.gen::<f64>() - 0.5).collect();
        seeds.push(v);
    }

    let runs = par_map(&seeds, |s| ascend(c, &comp, s.clone(), d, tol));
    let mut values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let best = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let tolerance_met = values.len() >= 2 && (values[0] - values[1]).abs() <= tol;
    let input = params_to_state(&runs[best].params, d);
    Ok(Q1Result {
        value: runs[best].value.max(0.0),
        input,
        iterations,
        tolerance_met,
    })
}

// ============================================================================
// threshold finder
// ============================================================================

const THRESHOLD_TOL: f64 = 1e-8;
const MONOTONE_SAMPLES: usize = 32;

/// Finds the first zero of a non-increasing curve on [lo, hi] by bisection.
///
/// Requires curve(lo) > 0 and curve(hi) <= 0 (`NoSignChange` otherwise) and
/// checks non-increase on a 32-point sample (`NonMonotone`). The returned
/// point is accurate to 1e-8.
pub fn find_zero_threshold(curve: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::ParamOutOfRange {
            name: "bracket",
            value: hi - lo,
        });
    }
    let flo = curve(lo);
    let fhi = curve(hi);
    if !(flo > 0.0 && fhi <= 0.0) {
        return Err(Error::NoSignChange);
    }
    let mut prev = flo;
    for i in 1..=MONOTONE_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / MONOTONE_SAMPLES as f64;
        let v = curve(x);
        if v > prev + 1e-9 {
            return Err(Error::NonMonotone);
        }
        prev = v;
    }
    let mut a = lo;
    let mut b = hi;
    while b - a > THRESHOLD_TOL {
        let mid = 0.5 * (a + b);
        if curve(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
