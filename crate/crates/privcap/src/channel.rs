//! Channels in Kraus form, their isometric extensions, complementary channels
//! and Choi matrices.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! | object        | convention                                                        |
//! |---------------|-------------------------------------------------------------------|
//! | Kraus set     | K_k: C^din -> C^dout, sum_k K_k† K_k = I within 1e-8 (max entry)    |
//! | isometry      | V = sum_k K_k ⊗ |k>_E, output factor first, environment second     |
//! | complementary | rho -> Tr_B V rho V†, acts into C^{#kraus}                          |
//! | Choi matrix   | J = (id ⊗ N)(|Φ><Φ|), |Φ> = sum_i |ii>/√din, index (i,b) = i·dout+b |
//!
//! With this normalization J is positive semidefinite with unit trace and its
//! partial trace over the output factor is I/din.

use crate::error::{Error, Result};
use crate::linalg::{
    cre, czero, dagger, herm_eigen, hermitize, identity, kron, max_abs, partial_trace_second,
    trace, trace_norm_hermitian, zeros, CMat, CVec,
};
use num_complex::Complex64;

/// Largest tolerated completeness / unitarity / trace defect on construction.
pub const CHANNEL_TOL: f64 = 1e-8;

/// Most negative eigenvalue a density matrix may carry before rejection.
pub const STATE_EIG_FLOOR: f64 = -1e-10;

/// Cap on the Kraus count produced by tensor / compose / mixture.
pub const KRAUS_CAP: usize = 4096;

/// Default cap on the symmetric-channel input dimension d.
pub const SYMMETRIC_DIM_CAP: usize = 8;

/// Eigenvalue cutoff used by `minimize_kraus`.
pub const KRAUS_MIN_CUTOFF: f64 = 1e-12;

// ============================================================================
// density matrices
// ============================================================================

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace (within 1e-10) and spectrum
    /// (eigenvalues above -1e-10). The stored matrix is hermitized.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::NotAState("matrix is not square".into()));
        }
        let herm_defect = max_abs(&(&mat - dagger(&mat)));
        if herm_defect > 1e-8 {
            return Err(Error::NotAState(format!(
                "hermiticity defect {herm_defect:.3e}"
            )));
        }
        let mat = hermitize(&mat);
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::NotAState(format!("trace {tr} is not 1")));
        }
        let min_eig = mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < STATE_EIG_FLOOR {
            return Err(Error::NotAState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Skips validation. For internal use on matrices produced by channel
    /// application, where the invariants hold by construction.
    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        Self {
            mat: hermitize(&mat),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: identity(d).scale(1.0 / d as f64),
        }
    }

    pub fn basis_state(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index out of range");
        let mut m = zeros(d, d);
        m[(i, i)] = cre(1.0);
        Self { mat: m }
    }

    pub fn from_pure(v: &CVec) -> Result<Self> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(Error::NotAState("zero vector".into()));
        }
        let v = v.scale(1.0 / n);
        let d = v.len();
        let mut m = zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(Self { mat: m })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }
}

// ============================================================================
// channels
// ============================================================================

/// Completely positive trace-preserving map in Kraus form.
///
/// Zero Kraus operators are retained as given; `minimize_kraus` strips them.
#[derive(Debug, Clone)]
pub struct Channel {
    kraus: Vec<CMat>,
    din: usize,
    dout: usize,
}

impl Channel {
    /// Builds a channel from a Kraus set, validating shapes and completeness.
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::ShapeMismatch);
        }
        let dout = kraus[0].nrows();
        let din = kraus[0].ncols();
        if din == 0 || dout == 0 {
            return Err(Error::ShapeMismatch);
        }
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::ShapeMismatch);
            }
        }
        let mut acc = zeros(din, din);
        for k in &kraus {
            acc += dagger(k) * k;
        }
        let residual = max_abs(&(acc - identity(din)));
        if residual > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(Self { kraus, din, dout })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// Applies the map to a raw matrix without state validation. The
    /// certifier uses this on (non-positive) matrix-unit inputs.
    pub(crate) fn apply_raw(&self, m: &CMat) -> CMat {
        let mut out = zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += k * m * dagger(k);
        }
        out
    }

    /// Applies the channel: rho -> sum_k K_k rho K_k†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.din {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs channel input {}",
                rho.dim(),
                self.din
            )));
        }
        let mut out = zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += k * rho.matrix() * dagger(k);
        }
        Ok(DensityMatrix::new_unchecked(out))
    }

    /// Stinespring isometry V = sum_k K_k ⊗ |k>_E : C^din -> C^dout ⊗ C^{#kraus}.
    pub fn isometric_extension(&self) -> Isometry {
        let ne = self.kraus.len();
        let mut v = zeros(self.dout * ne, self.din);
        for (k, kk) in self.kraus.iter().enumerate() {
            for b in 0..self.dout {
                for i in 0..self.din {
                    v[(b * ne + k, i)] = kk[(b, i)];
                }
            }
        }
        Isometry {
            mat: v,
            din: self.din,
            dout: self.dout,
            denv: ne,
        }
    }

    /// Complementary channel rho -> Tr_B V rho V†, mapping into the
    /// environment of dimension `kraus_count()`.
    pub fn complementary(&self) -> Channel {
        let ne = self.kraus.len();
        let mut comp = Vec::with_capacity(self.dout);
        for j in 0..self.dout {
            let mut b = zeros(ne, self.din);
            for (k, kk) in self.kraus.iter().enumerate() {
                for i in 0..self.din {
                    b[(k, i)] = kk[(j, i)];
                }
            }
            comp.push(b);
        }
        // completeness transfers exactly from the original Kraus set
        Channel {
            kraus: comp,
            din: self.din,
            dout: ne,
        }
    }

    /// Choi matrix J = (id ⊗ N)(|Φ><Φ|) = (1/din) sum_k w_k w_k† with
    /// w_k[(i,b)] = K_k[b,i].
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.din * self.dout;
        let mut j = zeros(d, d);
        for k in &self.kraus {
            let mut w = CVec::zeros(d);
            for i in 0..self.din {
                for b in 0..self.dout {
                    w[i * self.dout + b] = k[(b, i)];
                }
            }
            for r in 0..d {
                for c in 0..d {
                    j[(r, c)] += w[r] * w[c].conj();
                }
            }
        }
        ChoiMatrix {
            mat: j.scale(1.0 / self.din as f64),
            din: self.din,
            dout: self.dout,
        }
    }

    /// Tensor product channel with Kraus set {A_i ⊗ B_j}.
    pub fn tensor(&self, other: &Channel) -> Result<Channel> {
        let count = self.kraus.len() * other.kraus.len();
        if count > KRAUS_CAP {
            return Err(Error::KrausBlowup(count, KRAUS_CAP));
        }
        let mut kraus = Vec::with_capacity(count);
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b));
            }
        }
        Ok(Channel {
            kraus,
            din: self.din * other.din,
            dout: self.dout * other.dout,
        })
    }

    /// after ∘ before, with Kraus set {A_i B_j}.
    pub fn compose(after: &Channel, before: &Channel) -> Result<Channel> {
        if before.dout != after.din {
            return Err(Error::DimensionMismatch(format!(
                "compose: inner output {} vs outer input {}",
                before.dout, after.din
            )));
        }
        let count = after.kraus.len() * before.kraus.len();
        if count > KRAUS_CAP {
            return Err(Error::KrausBlowup(count, KRAUS_CAP));
        }
        let mut kraus = Vec::with_capacity(count);
        for a in &after.kraus {
            for b in &before.kraus {
                kraus.push(a * b);
            }
        }
        Ok(Channel {
            kraus,
            din: before.din,
            dout: after.dout,
        })
    }

    /// Convex mixture sum_i p_i N_i with Kraus set {√p_i K}.
    pub fn mixture(parts: &[(f64, Channel)]) -> Result<Channel> {
        if parts.is_empty() {
            return Err(Error::BadDistribution("empty mixture".into()));
        }
        let mut total = 0.0;
        for (p, _) in parts {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::BadDistribution(format!("weight {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadDistribution(format!("weights sum to {total}")));
        }
        let din = parts[0].1.din;
        let dout = parts[0].1.dout;
        let mut kraus = Vec::new();
        for (p, ch) in parts {
            if ch.din != din || ch.dout != dout {
                return Err(Error::DimensionMismatch(
                    "mixture parts must share dimensions".into(),
                ));
            }
            let w = p.sqrt();
            for k in &ch.kraus {
                kraus.push(k.scale(w));
            }
        }
        if kraus.len() > KRAUS_CAP {
            return Err(Error::KrausBlowup(kraus.len(), KRAUS_CAP));
        }
        Ok(Channel { kraus, din, dout })
    }

    /// post · N(pre ρ pre†) · post†, both conjugating matrices unitary.
    pub fn conjugate(&self, pre: &CMat, post: &CMat) -> Result<Channel> {
        check_unitary(pre)?;
        check_unitary(post)?;
        if pre.nrows() != self.din || post.nrows() != self.dout {
            return Err(Error::DimensionMismatch(
                "conjugating unitaries must match channel dimensions".into(),
            ));
        }
        let kraus = self.kraus.iter().map(|k| post * k * pre).collect();
        Ok(Channel {
            kraus,
            din: self.din,
            dout: self.dout,
        })
    }

    /// Rebuilds a minimal Kraus set from the Choi eigendecomposition,
    /// dropping eigenvalues at or below `KRAUS_MIN_CUTOFF`.
    pub fn minimize_kraus(&self) -> Channel {
        let j = self.choi();
        let c = j.mat.scale(self.din as f64);
        let (ev, vecs) = herm_eigen(&c);
        let mut kraus = Vec::new();
        for (k, lam) in ev.iter().enumerate() {
            if *lam > KRAUS_MIN_CUTOFF {
                let col = vecs.column(k);
                let w = cre(lam.sqrt());
                let mut km = zeros(self.dout, self.din);
                for i in 0..self.din {
                    for b in 0..self.dout {
                        km[(b, i)] = w * col[i * self.dout + b];
                    }
                }
                kraus.push(km);
            }
        }
        Channel {
            kraus,
            din: self.din,
            dout: self.dout,
        }
    }
}

fn check_unitary(u: &CMat) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotUnitary(f64::INFINITY));
    }
    let res = max_abs(&(dagger(u) * u - identity(u.ncols())));
    if res > 1e-10 {
        return Err(Error::NotUnitary(res));
    }
    Ok(())
}

// ============================================================================
// isometries and Choi matrices
// ============================================================================

/// Stinespring dilation V: C^din -> C^dout ⊗ C^denv with V†V = I.
#[derive(Debug, Clone)]
pub struct Isometry {
    mat: CMat,
    din: usize,
    dout: usize,
    denv: usize,
}

impl Isometry {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn denv(&self) -> usize {
        self.denv
    }

    /// V ρ V† on the joint output ⊗ environment space.
    pub fn dilate(&self, rho: &DensityMatrix) -> Result<CMat> {
        if rho.dim() != self.din {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs isometry input {}",
                rho.dim(),
                self.din
            )));
        }
        Ok(&self.mat * rho.matrix() * dagger(&self.mat))
    }
}

/// Choi matrix of a channel, with the input copy as the first tensor factor.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    mat: CMat,
    din: usize,
    dout: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    /// Partial trace over the output factor; equals I/din for a channel.
    pub fn input_marginal(&self) -> CMat {
        partial_trace_second(&self.mat, self.din, self.dout)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::linalg::herm_eigenvalues(&self.mat)
    }
}

/// Trace distance between the Choi matrices of two channels with equal
/// dimensions. Zero iff the channels are equal as maps.
pub fn choi_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.din != b.din || a.dout != b.dout {
        return Err(Error::DimensionMismatch(format!(
            "choi_distance: ({}, {}) vs ({}, {})",
            a.din, a.dout, b.din, b.dout
        )));
    }
    Ok(trace_norm_hermitian(&(a.choi().mat - b.choi().mat)))
}

// ============================================================================
// named constructors
// ============================================================================

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[czero(), cre(1.0), cre(1.0), czero()])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            czero(),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            czero(),
        ],
    )
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[cre(1.0), czero(), czero(), cre(-1.0)])
}

impl Channel {
    pub fn identity_channel(d: usize) -> Channel {
        Channel {
            kraus: vec![identity(d)],
            din: d,
            dout: d,
        }
    }

    pub fn unitary(u: &CMat) -> Result<Channel> {
        check_unitary(u)?;
        Ok(Channel {
            kraus: vec![u.clone()],
            din: u.ncols(),
            dout: u.nrows(),
        })
    }

    /// Two-parameter qubit channel with Kraus operators
    /// A_0 = diag(√(1-γ), √(1-δ)) and A_1 = [[0, √δ], [√γ, 0]].
    ///
    /// δ = 0 damps |0> toward |1> at rate γ; γ = 0 damps |1> toward |0> at
    /// rate δ and coincides with `amplitude_damping(δ)`. The two orientations
    /// are exchanged by conjugation with X and share all capacity values.
    pub fn two_kraus(gamma: f64, delta: f64) -> Result<Channel> {
        check_unit_interval("gamma", gamma)?;
        check_unit_interval("delta", delta)?;
        let a0 = CMat::from_row_slice(
            2,
            2,
            &[
                cre((1.0 - gamma).sqrt()),
                czero(),
                czero(),
                cre((1.0 - delta).sqrt()),
            ],
        );
        let a1 = CMat::from_row_slice(
            2,
            2,
            &[czero(), cre(delta.sqrt()), cre(gamma.sqrt()), czero()],
        );
        Ok(Channel {
            kraus: vec![a0, a1],
            din: 2,
            dout: 2,
        })
    }

    /// Textbook amplitude damping: |1> decays to |0> with probability γ.
    /// Equals `two_kraus(0, γ)` exactly and `two_kraus(γ, 0)` up to X ⊗ X
    /// relabeling.
    pub fn amplitude_damping(gamma: f64) -> Result<Channel> {
        Channel::two_kraus(0.0, gamma)
    }

    /// Pauli channel (1-p1-p2-p3) ρ + p1 XρX + p2 YρY + p3 ZρZ.
    pub fn pauli(p1: f64, p2: f64, p3: f64) -> Result<Channel> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::BadDistribution(format!("{name} = {p}")));
            }
        }
        let p0 = 1.0 - p1 - p2 - p3;
        if p0 < -1e-12 {
            return Err(Error::BadDistribution(format!(
                "pauli weights sum to {}",
                p1 + p2 + p3
            )));
        }
        let p0 = p0.max(0.0);
        let kraus = vec![
            identity(2).scale(p0.sqrt()),
            pauli_x().scale(p1.sqrt()),
            pauli_y().scale(p2.sqrt()),
            pauli_z().scale(p3.sqrt()),
        ];
        Ok(Channel {
            kraus,
            din: 2,
            dout: 2,
        })
    }

    /// Phase damping: ρ -> (1-p) ρ + p ZρZ.
    pub fn dephasing(p: f64) -> Result<Channel> {
        check_unit_interval("p", p)?;
        Channel::pauli(0.0, 0.0, p)
    }

    /// Depolarizing channel in Pauli form (p/3, p/3, p/3).
    pub fn depolarizing(p: f64) -> Result<Channel> {
        check_unit_interval("p", p)?;
        Channel::pauli(p / 3.0, p / 3.0, p / 3.0)
    }

    /// Erasure channel: keeps the input with probability 1-p, otherwise
    /// replaces it with the flag state |d> appended as an extra dimension.
    pub fn erasure(p: f64, d: usize) -> Result<Channel> {
        check_unit_interval("p", p)?;
        if d < 1 {
            return Err(Error::DimensionMismatch("erasure needs d >= 1".into()));
        }
        let mut embed = zeros(d + 1, d);
        for i in 0..d {
            embed[(i, i)] = cre(1.0);
        }
        let mut kraus = vec![embed.scale((1.0 - p).sqrt())];
        for i in 0..d {
            let mut k = zeros(d + 1, d);
            k[(d, i)] = cre(p.sqrt());
            kraus.push(k);
        }
        Ok(Channel {
            kraus,
            din: d,
            dout: d + 1,
        })
    }

    /// Symmetric-subspace channel: isometry from C^{d(d+1)/2} onto the
    /// symmetric subspace of C^d ⊗ C^d, then trace out the second factor.
    /// Basis order: |jj> for j < d, then (|jk> + |kj>)/√2 for j < k in
    /// lexicographic order.
    pub fn symmetric(d: usize) -> Result<Channel> {
        Channel::symmetric_with_cap(d, SYMMETRIC_DIM_CAP)
    }

    pub fn symmetric_with_cap(d: usize, cap: usize) -> Result<Channel> {
        if d < 2 {
            return Err(Error::DimensionMismatch("symmetric needs d >= 2".into()));
        }
        if d > cap {
            return Err(Error::DimensionTooLarge { dim: d, cap });
        }
        let din = d * (d + 1) / 2;
        let mut v = zeros(d * d, din);
        let mut col = 0;
        for j in 0..d {
            v[(j * d + j, col)] = cre(1.0);
            col += 1;
        }
        let half = cre(1.0 / std::f64::consts::SQRT_2);
        for j in 0..d {
            for k in (j + 1)..d {
                v[(j * d + k, col)] = half;
                v[(k * d + j, col)] = half;
                col += 1;
            }
        }
        // Kraus K_k = (I ⊗ <k|) V
        let mut kraus = Vec::with_capacity(d);
        for k in 0..d {
            let mut km = zeros(d, din);
            for b in 0..d {
                for m in 0..din {
                    km[(b, m)] = v[(b * d + k, m)];
                }
            }
            kraus.push(km);
        }
        Ok(Channel {
            kraus,
            din,
            dout: d,
        })
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::ParamOutOfRange { name, value });
    }
    Ok(())
}

// ============================================================================
// tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn ad(g: f64) -> Channel {
        Channel::amplitude_damping(g).unwrap()
    }

    #[test]
    fn valid_qubit_channel_from_mixed_kraus() {
        let k = vec![
            identity(2).scale(0.6f64.sqrt()),
            pauli_x().scale(0.4f64.sqrt()),
        ];
        let c = Channel::new(k).unwrap();
        assert_eq!((c.din(), c.dout()), (2, 2));
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let k = vec![identity(2).scale(0.9)];
        match Channel::new(k) {
            Err(Error::NotTracePreserving(r)) => assert!(r > 1e-8),
            other => panic!("expected completeness failure, got {other:?}"),
        }
    }

    #[test]
    fn mixed_shapes_rejected() {
        let k = vec![identity(2), zeros(3, 2)];
        assert!(matches!(Channel::new(k), Err(Error::ShapeMismatch)));
    }

    #[test]
    fn zero_kraus_operators_are_retained() {
        let k = vec![identity(2), zeros(2, 2)];
        let c = Channel::new(k).unwrap();
        assert_eq!(c.kraus_count(), 2);
        assert_eq!(c.minimize_kraus().kraus_count(), 1);
    }

    #[test]
    fn full_damping_sends_everything_to_ground() {
        let c = ad(1.0);
        for rho in [
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::basis_state(2, 1),
        ] {
            let out = c.apply(&rho).unwrap();
            assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
            assert!(out.matrix()[(1, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn dephasing_half_kills_coherence() {
        let plus = DensityMatrix::from_pure(&CVec::from_vec(vec![
            cre(std::f64::consts::FRAC_1_SQRT_2),
            cre(std::f64::consts::FRAC_1_SQRT_2),
        ]))
        .unwrap();
        let out = Channel::dephasing(0.5).unwrap().apply(&plus).unwrap();
        assert!(max_abs(&(out.matrix() - identity(2).scale(0.5))) < 1e-12);
    }

    #[test]
    fn isometry_columns_orthonormal() {
        for c in [
            ad(0.3),
            Channel::depolarizing(0.2).unwrap(),
            Channel::erasure(0.25, 2).unwrap(),
        ] {
            let v = c.isometric_extension();
            let g = dagger(v.matrix()) * v.matrix();
            assert!(max_abs(&(g - identity(c.din()))) < 1e-12);
        }
    }

    #[test]
    fn dilation_marginal_recovers_channel_output() {
        let c = ad(0.3);
        let rho = DensityMatrix::maximally_mixed(2);
        let v = c.isometric_extension();
        let joint = v.dilate(&rho).unwrap();
        let marg = partial_trace_second(&joint, c.dout(), v.denv());
        let direct = c.apply(&rho).unwrap();
        assert!(max_abs(&(marg - direct.matrix())) < 1e-12);
    }

    #[test]
    fn complementary_of_identity_is_trace_channel() {
        let c = Channel::identity_channel(2).complementary();
        assert_eq!((c.din(), c.dout()), (2, 1));
        let out = c.apply(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complementary_of_amplitude_damping_is_flipped_damping() {
        // in this Kraus ordering the relabeling is the identity: N̂_γ = N_{1-γ}
        let g = 0.3;
        let comp = ad(g).complementary();
        assert_eq!((comp.din(), comp.dout()), (2, 2));
        assert!(choi_distance(&comp, &ad(1.0 - g)).unwrap() < 1e-10);
    }

    #[test]
    fn double_complement_preserves_choi_spectrum() {
        for c in [ad(0.3), Channel::two_kraus(0.4, 0.2).unwrap()] {
            let c = c.minimize_kraus();
            let cc = c.complementary().complementary();
            assert_eq!((cc.din(), cc.dout()), (c.din(), c.dout()));
            let ev1 = c.choi().eigenvalues();
            let ev2 = cc.choi().eigenvalues();
            for (a, b) in ev1.iter().zip(ev2.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn choi_marginal_is_maximally_mixed() {
        for c in [
            ad(0.3),
            Channel::erasure(0.25, 2).unwrap(),
            Channel::symmetric(2).unwrap(),
        ] {
            let j = c.choi();
            let marg = j.input_marginal();
            assert!(max_abs(&(marg - identity(c.din()).scale(1.0 / c.din() as f64))) < 1e-12);
            let min_eig = j.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            assert!(min_eig > -1e-12);
            assert!((trace(j.matrix()).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_three_quarters_has_flat_choi() {
        let j = Channel::depolarizing(0.75).unwrap().choi();
        assert!(max_abs(&(j.matrix() - identity(4).scale(0.25))) < 1e-12);
    }

    #[test]
    fn choi_distance_identity_vs_full_depolarizing() {
        let d = choi_distance(
            &Channel::identity_channel(2),
            &Channel::depolarizing(0.75).unwrap(),
        )
        .unwrap();
        assert!((d - 1.5).abs() < 1e-12);
    }

    #[test]
    fn choi_distance_dimension_guard() {
        let a = Channel::identity_channel(2);
        let b = Channel::identity_channel(3);
        assert!(matches!(
            choi_distance(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn compose_dephasings_adds_flip_rates() {
        let a = Channel::dephasing(0.1).unwrap();
        let b = Channel::dephasing(0.2).unwrap();
        let ab = Channel::compose(&a, &b).unwrap();
        let expect = Channel::dephasing(0.1 + 0.2 - 2.0 * 0.1 * 0.2).unwrap();
        assert!(choi_distance(&ab, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_dimensions_multiply() {
        let c = ad(0.3).tensor(&Channel::symmetric(2).unwrap()).unwrap();
        assert_eq!((c.din(), c.dout()), (6, 4));
        assert_eq!(c.kraus_count(), 4);
    }

    #[test]
    fn tensor_blowup_guard() {
        // 70 kraus ops tensored with itself exceeds 4096
        let kraus = vec![identity(2).scale((1.0 / 70.0f64).sqrt()); 70];
        let c = Channel::new(kraus).unwrap();
        assert!(matches!(c.tensor(&c), Err(Error::KrausBlowup(4900, _))));
    }

    #[test]
    fn mixture_weights_validated() {
        let c = ad(0.3);
        assert!(matches!(
            Channel::mixture(&[(0.7, c.clone()), (0.4, c.clone())]),
            Err(Error::BadDistribution(_))
        ));
        assert!(matches!(
            Channel::mixture(&[(-0.1, c.clone()), (1.1, c)]),
            Err(Error::BadDistribution(_))
        ));
    }

    #[test]
    fn conjugate_requires_unitary() {
        let c = ad(0.3);
        let m = identity(2).scale(0.5);
        assert!(matches!(
            c.conjugate(&m, &identity(2)),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn conjugate_preserves_choi_spectrum() {
        let c = ad(0.3);
        let u = CMat::from_row_slice(
            2,
            2,
            &[
                cre(std::f64::consts::FRAC_1_SQRT_2),
                cre(std::f64::consts::FRAC_1_SQRT_2),
                cre(-std::f64::consts::FRAC_1_SQRT_2),
                cre(std::f64::consts::FRAC_1_SQRT_2),
            ],
        );
        let cc = c.conjugate(&u, &u).unwrap();
        let ev1 = c.choi().eigenvalues();
        let ev2 = cc.choi().eigenvalues();
        for (a, b) in ev1.iter().zip(ev2.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_kraus_orientations_match_up_to_x_relabeling() {
        let g = 0.36;
        // (0, γ) is textbook damping exactly
        assert!(choi_distance(&Channel::two_kraus(0.0, g).unwrap(), &ad(g)).unwrap() < 1e-14);
        // (γ, 0) is the X ⊗ X relabeled version
        let x = pauli_x();
        let flipped = ad(g).conjugate(&x, &x).unwrap();
        assert!(choi_distance(&Channel::two_kraus(g, 0.0).unwrap(), &flipped).unwrap() < 1e-14);
    }

    #[test]
    fn two_kraus_param_guard() {
        assert!(matches!(
            Channel::two_kraus(1.2, 0.0),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            Channel::two_kraus(0.3, -0.1),
            Err(Error::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn erasure_output_spectrum() {
        let c = Channel::erasure(0.25, 2).unwrap();
        let out = c.apply(&DensityMatrix::maximally_mixed(2)).unwrap();
        let mut ev = crate::linalg::herm_eigenvalues(out.matrix());
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [0.25, 0.375, 0.375];
        for (a, b) in ev.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn erasure_p0_is_isometric_embedding() {
        let c = Channel::erasure(0.0, 2).unwrap().minimize_kraus();
        assert_eq!(c.kraus_count(), 1);
        let rho = DensityMatrix::basis_state(2, 1);
        let out = c.apply(&rho).unwrap();
        assert!((out.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erasure_p1_is_constant_flag() {
        let c = Channel::erasure(1.0, 2).unwrap();
        let out = c.apply(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((out.matrix()[(2, 2)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_channel_is_self_complementary() {
        for d in [2usize, 3, 4] {
            let c = Channel::symmetric(d).unwrap();
            assert_eq!((c.din(), c.dout()), (d * (d + 1) / 2, d));
            let comp = c.complementary();
            assert!(choi_distance(&c, &comp).unwrap() < 1e-12);
        }
    }

    #[test]
    fn symmetric_dim_cap_enforced() {
        assert!(matches!(
            Channel::symmetric(9),
            Err(Error::DimensionTooLarge { dim: 9, cap: 8 })
        ));
        assert!(Channel::symmetric_with_cap(9, 10).is_ok());
    }

    #[test]
    fn minimize_kraus_respects_cutoff_boundary() {
        // the scaled-Choi eigenvalue of the X term is 2*eps; below the 1e-12
        // cutoff it is dropped, and completeness only moves by 2*eps which
        // stays within channel tolerance
        let eps = 4e-13f64;
        let k = vec![
            identity(2).scale((1.0 - eps).sqrt()),
            pauli_x().scale(eps.sqrt()),
        ];
        let c = Channel::new(k).unwrap();
        assert_eq!(c.minimize_kraus().kraus_count(), 1);
        // well above the cutoff both survive
        let eps = 1e-10f64;
        let k = vec![
            identity(2).scale((1.0 - eps).sqrt()),
            pauli_x().scale(eps.sqrt()),
        ];
        let c = Channel::new(k).unwrap();
        assert_eq!(c.minimize_kraus().kraus_count(), 2);
    }

    #[test]
    fn minimize_kraus_preserves_the_map() {
        let c = Channel::depolarizing(0.3).unwrap();
        let m = c.minimize_kraus();
        assert!(choi_distance(&c, &m).unwrap() < 1e-10);
    }

    #[test]
    fn density_matrix_rejects_bad_inputs() {
        assert!(matches!(
            DensityMatrix::new(identity(2)),
            Err(Error::NotAState(_))
        ));
        let mut m = zeros(2, 2);
        m[(0, 0)] = cre(1.5);
        m[(1, 1)] = cre(-0.5);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotAState(_))));
    }
}
