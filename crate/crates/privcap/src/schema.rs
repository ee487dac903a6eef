//! JSON descriptions of channels, certificates, decompositions and
//! ensembles. Parsing is strict: unknown fields are rejected, and every
//! reconstructed object passes the same validation as one built in code.
//!
//! Channels are written either parametrically (`{"type": "pauli", ...}`) or
//! as raw Kraus matrices with complex entries encoded as `[re, im]` pairs.

use crate::bound::{bb84_channel, Decomposition, DecompositionPart};
use crate::certify::{DegradingCertificate, Direction};
use crate::channel::{Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::info::CqEnsemble;
use crate::linalg::CMat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default bound on the input dimension of parametric constructors.
pub const DEFAULT_MAX_DIM: usize = 8;

const MAX_KRAUS_TERMS: usize = 4096;

/// Complex matrix as rows of `[re, im]` entries.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::ShapeMismatch);
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::ShapeMismatch);
    }
    let mut m = CMat::zeros(rows.len(), ncols);
    for (r, row) in rows.iter().enumerate() {
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::ShapeMismatch);
            }
            m[(r, c)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

// ============================================================================
// channels
// ============================================================================

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Pauli(PauliParams),
    TwoKraus(TwoKrausParams),
    Erasure(ErasureParams),
    Symmetric(SymmetricParams),
    AmplitudeDamping(AmplitudeDampingParams),
    Dephasing(ProbParams),
    Depolarizing(ProbParams),
    Bb84(Bb84Params),
    Identity(DimParams),
    Kraus(KrausParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoKrausParams {
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErasureParams {
    pub p: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricParams {
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeDampingParams {
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbParams {
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bb84Params {
    pub q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimParams {
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausParams {
    pub kraus: Vec<MatrixJson>,
}

fn check_dim(dim: usize, cap: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::DimensionMismatch(
            "dimension must be positive".into(),
        ));
    }
    if dim > cap {
        return Err(Error::DimensionTooLarge { dim, cap });
    }
    Ok(())
}

impl ChannelSpec {
    /// Builds the channel, bounding parametric input dimensions by
    /// `max_dim` (raw Kraus inputs likewise; their outputs may reach
    /// `max_dim^2` to admit serialized forms of the widest constructors).
    pub fn to_channel(&self, max_dim: usize) -> Result<Channel> {
        match self {
            ChannelSpec::Pauli(p) => Channel::pauli(p.p1, p.p2, p.p3),
            ChannelSpec::TwoKraus(p) => Channel::two_kraus(p.gamma, p.delta),
            ChannelSpec::Erasure(p) => {
                check_dim(p.dim, max_dim)?;
                Channel::erasure(p.p, p.dim)
            }
            ChannelSpec::Symmetric(p) => Channel::symmetric_with_cap(p.dim, max_dim),
            ChannelSpec::AmplitudeDamping(p) => Channel::amplitude_damping(p.gamma),
            ChannelSpec::Dephasing(p) => Channel::dephasing(p.p),
            ChannelSpec::Depolarizing(p) => Channel::depolarizing(p.p),
            ChannelSpec::Bb84(p) => bb84_channel(p.q),
            ChannelSpec::Identity(p) => {
                check_dim(p.dim, max_dim)?;
                Ok(Channel::identity_channel(p.dim))
            }
            ChannelSpec::Kraus(p) => {
                if p.kraus.is_empty() {
                    return Err(Error::ShapeMismatch);
                }
                if p.kraus.len() > MAX_KRAUS_TERMS {
                    return Err(Error::KrausBlowup(p.kraus.len(), MAX_KRAUS_TERMS));
                }
                let mats = p
                    .kraus
                    .iter()
                    .map(matrix_from_json)
                    .collect::<Result<Vec<_>>>()?;
                check_dim(mats[0].ncols(), max_dim)?;
                check_dim(mats[0].nrows(), max_dim * max_dim)?;
                Channel::new(mats)
            }
        }
    }

    /// Raw Kraus description of an existing channel.
    pub fn from_channel(c: &Channel) -> Self {
        ChannelSpec::Kraus(KrausParams {
            kraus: c.kraus().iter().map(matrix_to_json).collect(),
        })
    }
}

// ============================================================================
// certificates
// ============================================================================

/// Serialized degradability witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub direction: Direction,
    pub degrading_map: ChannelSpec,
    pub residual: f64,
}

impl CertificateFile {
    pub fn from_certificate(cert: &DegradingCertificate) -> Self {
        Self {
            direction: cert.direction,
            degrading_map: ChannelSpec::from_channel(&cert.degrading_map),
            residual: cert.residual,
        }
    }

    pub fn to_certificate(&self, max_dim: usize) -> Result<DegradingCertificate> {
        Ok(DegradingCertificate {
            direction: self.direction,
            degrading_map: self.degrading_map.to_channel(max_dim)?,
            residual: self.residual,
            iterations: 0,
        })
    }
}

// ============================================================================
// decompositions
// ============================================================================

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub target: ChannelSpec,
    pub parts: Vec<DecompositionPartFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionPartFile {
    pub prob: f64,
    pub inner: ChannelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<ChannelSpec>,
}

impl DecompositionFile {
    pub fn to_decomposition(&self, max_dim: usize) -> Result<Decomposition> {
        let target = self.target.to_channel(max_dim)?;
        let parts = self
            .parts
            .iter()
            .map(|p| {
                Ok(DecompositionPart {
                    prob: p.prob,
                    inner: p.inner.to_channel(max_dim)?,
                    post: match &p.post {
                        Some(spec) => Some(spec.to_channel(max_dim)?),
                        None => None,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { target, parts })
    }

    pub fn from_decomposition(d: &Decomposition) -> Self {
        Self {
            target: ChannelSpec::from_channel(&d.target),
            parts: d
                .parts
                .iter()
                .map(|p| DecompositionPartFile {
                    prob: p.prob,
                    inner: ChannelSpec::from_channel(&p.inner),
                    post: p.post.as_ref().map(ChannelSpec::from_channel),
                })
                .collect(),
        }
    }
}

// ============================================================================
// ensembles
// ============================================================================

/// Classical-quantum ensemble with optional post-processing rows
/// `processing[t][x] = p(t | x)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub probs: Vec<f64>,
    pub states: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processing: Option<Vec<Vec<f64>>>,
}

impl EnsembleFile {
    pub fn to_ensemble(&self, max_dim: usize) -> Result<CqEnsemble> {
        let states = self
            .states
            .iter()
            .map(|m| {
                let mat = matrix_from_json(m)?;
                check_dim(mat.nrows(), max_dim)?;
                DensityMatrix::new(mat)
            })
            .collect::<Result<Vec<_>>>()?;
        CqEnsemble::new(self.probs.clone(), states, self.processing.clone())
    }
}

// ============================================================================
// tests
// ============================================================================
