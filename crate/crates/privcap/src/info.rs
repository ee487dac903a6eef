//! Entropic quantities, all in bits.

use crate::channel::{Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{zeros, CMat};

/// Binary entropy H(p) = -p log2 p - (1-p) log2 (1-p), with H(0) = H(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange {
            name: "p",
            value: p,
        });
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

fn entropy_of_matrix(m: &CMat) -> f64 {
    // eigenvalues of a density matrix; round-off below zero is clamped,
    // anything below -1e-10 was already rejected at construction
    let mut s = 0.0;
    for lam in crate::linalg::herm_eigenvalues(m) {
        let l = lam.max(0.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    s
}

/// Von Neumann entropy S(ρ) = -Tr ρ log2 ρ.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_matrix(rho.matrix())
}

/// Coherent information I_c(ρ, N) = S(N(ρ)) - S(N̂(ρ)).
pub fn coherent_information(c: &Channel, rho: &DensityMatrix) -> Result<f64> {
    let out = c.apply(rho)?;
    let env = c.complementary().apply(rho)?;
    Ok(entropy(&out) - entropy(&env))
}

/// Classical-quantum ensemble {p_x, ρ_x} with an optional classical
/// post-processing map P(t|x) applied to the label.
#[derive(Debug, Clone)]
pub struct CqEnsemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
    /// processing[t][x] = P(t|x); columns sum to one.
    processing: Option<Vec<Vec<f64>>>,
}

impl CqEnsemble {
    pub fn new(
        probs: Vec<f64>,
        states: Vec<DensityMatrix>,
        processing: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::BadDistribution(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        let mut total = 0.0;
        for p in &probs {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::BadDistribution(format!("probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble states must share a dimension".into(),
            ));
        }
        if let Some(proc_rows) = &processing {
            if proc_rows.is_empty() {
                return Err(Error::BadDistribution("empty processing".into()));
            }
            let nx = probs.len();
            if proc_rows.iter().any(|row| row.len() != nx) {
                return Err(Error::BadDistribution(
                    "processing rows must have one entry per ensemble member".into(),
                ));
            }
            for x in 0..nx {
                let mut col = 0.0;
                for row in proc_rows {
                    if !row[x].is_finite() || row[x] < 0.0 {
                        return Err(Error::BadDistribution(format!(
                            "processing entry {}",
                            row[x]
                        )));
                    }
                    col += row[x];
                }
                if (col - 1.0).abs() > 1e-10 {
                    return Err(Error::BadDistribution(format!(
                        "processing column {x} sums to {col}"
                    )));
                }
            }
        }
        Ok(Self {
            probs,
            states,
            processing,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn processing(&self) -> Option<&Vec<Vec<f64>>> {
        self.processing.as_ref()
    }

    pub fn state_dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// Holevo mutual information I(X;B) = S(sum_x p_x ρ_x) - sum_x p_x S(ρ_x).
///
/// Accepts raw (probability, matrix) pairs so callers can pass sub-normalized
/// intermediate states; probabilities must still form a distribution.
pub fn cq_mutual_information(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    if probs.is_empty() || probs.len() != states.len() {
        return Err(Error::BadDistribution(
            "probability / state count mismatch".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadDistribution(format!("weights sum to {total}")));
    }
    let dim = states[0].dim();
    if states.iter().any(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "states must share a dimension".into(),
        ));
    }
    let mut avg = zeros(dim, dim);
    let mut cond = 0.0;
    for (p, s) in probs.iter().zip(states.iter()) {
        if *p == 0.0 {
            continue;
        }
        avg += s.matrix().scale(*p);
        cond += p * entropy(s);
    }
    Ok(entropy_of_matrix(&avg) - cond)
}

/// Private information of the processed ensemble through `c`:
/// I(T;B) - I(T;E), where T is the processed label, B the channel output and
/// E the environment. Without processing, T = X.
pub fn private_information(c: &Channel, e: &CqEnsemble) -> Result<f64> {
    if e.state_dim() != c.din() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dim {} vs channel input {}",
            e.state_dim(),
            c.din()
        )));
    }
    let comp = c.complementary();
    let out_b: Vec<DensityMatrix> = e
        .states()
        .iter()
        .map(|s| c.apply(s))
        .collect::<Result<_>>()?;
    let out_e: Vec<DensityMatrix> = e
        .states()
        .iter()
        .map(|s| comp.apply(s))
        .collect::<Result<_>>()?;

    let identity_proc;
    let proc = match e.processing() {
        Some(p) => p,
        None => {
            identity_proc = (0..e.len())
                .map(|t| {
                    (0..e.len())
                        .map(|x| if t == x { 1.0 } else { 0.0 })
                        .collect::<Vec<f64>>()
                })
                .collect::<Vec<_>>();
            &identity_proc
        }
    };

    // conditional states of T on each side; zero-probability labels drop out
    let mut probs_t = Vec::new();
    let mut states_b = Vec::new();
    let mut states_e = Vec::new();
    for row in proc {
        let pt: f64 = row
            .iter()
            .zip(e.probs().iter())
            .map(|(ptx, px)| ptx * px)
            .sum();
        if pt <= 0.0 {
            continue;
        }
        let mut mb = zeros(c.dout(), c.dout());
        let mut me = zeros(comp.dout(), comp.dout());
        for (x, (ptx, px)) in row.iter().zip(e.probs().iter()).enumerate() {
            let w = ptx * px / pt;
            if w > 0.0 {
                mb += out_b[x].matrix().scale(w);
                me += out_e[x].matrix().scale(w);
            }
        }
        probs_t.push(pt);
        states_b.push(DensityMatrix::new_unchecked(mb));
        states_e.push(DensityMatrix::new_unchecked(me));
    }
    let itb = cq_mutual_information(&probs_t, &states_b)?;
    let ite = cq_mutual_information(&probs_t, &states_e)?;
    Ok(itb - ite)
}

/// Private information witnessed through `c` running beside the symmetric
/// side channel on C^{d(d+1)/2}. The ensemble lives on the joint input.
/// Any single ensemble only witnesses a lower bound on the side-channel
/// assisted quantity.
pub fn ss_private_info_estimate(c: &Channel, d: usize, e: &CqEnsemble) -> Result<f64> {
    let side = Channel::symmetric(d)?;
    let joint = c.tensor(&side)?;
    private_information(&joint, e)
}
