//! Operator frames on the Hilbert-Schmidt space of a d-dimensional system:
//! the generalized-Pauli positive frame and the basis-induced family, their
//! closed-form duals, frame maps and bounds, canonical duals, and duality
//! verification.
//!
//! Index convention: a frame element is addressed by an ordered pair
//! `(k, j)`, 1-based. The canonical ordering lists the diagonal labels
//! `(1,1) ... (d,d)` first, then all off-diagonal pairs lexicographically.
//! Every weight vector, OPD term list and channel assignment in the crate
//! relies on this ordering.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hs::{hs_inner, HsOperator, C64};

/// Threshold below which the frame map is declared singular.
pub const FRAME_SINGULARITY_TOL: f64 = 1e-12;

/// 1-based index pair addressing a frame element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameLabel {
    pub k: usize,
    pub j: usize,
}

impl FrameLabel {
    pub fn new(k: usize, j: usize) -> Self {
        Self { k, j }
    }

    pub fn is_diagonal(&self) -> bool {
        self.k == self.j
    }
}

impl std::fmt::Display for FrameLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.k, self.j)
    }
}

/// Diagonal labels ascending, then off-diagonal pairs in lexicographic order.
pub fn canonical_labels(d: usize) -> Vec<FrameLabel> {
    let mut labels = Vec::with_capacity(d * d);
    for k in 1..=d {
        labels.push(FrameLabel::new(k, k));
    }
    for k in 1..=d {
        for j in 1..=d {
            if k != j {
                labels.push(FrameLabel::new(k, j));
            }
        }
    }
    labels
}

/// Off-diagonal Hermitian generator: symmetric for `k > j`, antisymmetric
/// (sigma_y-like) for `k < j`, both normalized to unit Hilbert-Schmidt norm.
fn off_diagonal_generator(d: usize, k: usize, j: usize) -> HsOperator {
    let inv_sqrt2 = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let ekj = HsOperator::matrix_unit(d, k - 1, j - 1);
    let ejk = HsOperator::matrix_unit(d, j - 1, k - 1);
    if k > j {
        (&ekj + &ejk).scale(inv_sqrt2)
    } else {
        (&ekj - &ejk).scale(C64::new(0.0, -1.0) * inv_sqrt2)
    }
}

/// Orthonormal Hermitian operator basis whose diagonal elements are the
/// projectors `|k><k|`; off-diagonal elements are shared with
/// [`gellmann_basis`]. Valid for any `d >= 1`.
pub fn hermitian_basis(d: usize) -> Vec<HsOperator> {
    canonical_labels(d)
        .iter()
        .map(|l| {
            if l.is_diagonal() {
                HsOperator::basis_projector(d, l.k - 1)
            } else {
                off_diagonal_generator(d, l.k, l.j)
            }
        })
        .collect()
}

/// Diagonal generalized Gell-Mann generator `h_k` (1-based `k`), unit norm.
fn diagonal_gellmann(d: usize, k: usize) -> HsOperator {
    if k == 1 {
        return HsOperator::identity(d).scale_re(1.0 / (d as f64).sqrt());
    }
    let norm = 1.0 / ((k * (k - 1)) as f64).sqrt();
    let mut m = HsOperator::zeros(d).into_matrix();
    for i in 0..k - 1 {
        m[(i, i)] = C64::new(norm, 0.0);
    }
    m[(k - 1, k - 1)] = C64::new(norm * (1.0 - k as f64), 0.0);
    HsOperator::new(m).unwrap()
}

/// Generalized Pauli (Gell-Mann) basis in canonical order: the diagonal
/// generators `h_1 ... h_d` first, then the off-diagonal ones. All elements
/// are Hermitian and traceless except `h_1` with trace `sqrt(d)`; for d = 2
/// and d = 3 they are the normalized Pauli and Gell-Mann matrices.
pub fn gellmann_basis(d: usize) -> Result<Vec<HsOperator>> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "generalized Pauli basis requires d >= 2, got {d}"
        )));
    }
    Ok(canonical_labels(d)
        .iter()
        .map(|l| {
            if l.is_diagonal() {
                diagonal_gellmann(d, l.k)
            } else {
                off_diagonal_generator(d, l.k, l.j)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameKind {
    Pauli,
    BasisInduced,
    Orthonormal,
    Custom,
}

/// An ordered family of Hermitian Hilbert-Schmidt operators with optional
/// dual family, Gram data and frame bounds.
#[derive(Debug, Clone)]
pub struct OperatorFrame {
    dim: usize,
    kind: FrameKind,
    labels: Vec<FrameLabel>,
    elements: Vec<HsOperator>,
    dual: Option<Vec<HsOperator>>,
    /// Rows are the coefficients of each element in [`hermitian_basis`].
    coeffs: DMatrix<f64>,
    dual_coeffs: Option<DMatrix<f64>>,
    gram: DMatrix<f64>,
    bounds: (f64, f64),
}

fn coefficient_matrix(dim: usize, ops: &[HsOperator]) -> Result<DMatrix<f64>> {
    let basis = hermitian_basis(dim);
    let mut coeffs = DMatrix::<f64>::zeros(ops.len(), dim * dim);
    for (row, op) in ops.iter().enumerate() {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "frame element {row} has dim {}, expected {dim}",
                op.dim()
            )));
        }
        if op.hermiticity_defect() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "frame element {row} is not Hermitian (defect {:.3e})",
                op.hermiticity_defect()
            )));
        }
        for (col, b) in basis.iter().enumerate() {
            coeffs[(row, col)] = hs_inner(b, op)?.re;
        }
    }
    Ok(coeffs)
}

fn ops_from_coefficients(dim: usize, coeffs: &DMatrix<f64>) -> Vec<HsOperator> {
    let basis = hermitian_basis(dim);
    (0..coeffs.nrows())
        .map(|row| {
            let mut acc = HsOperator::zeros(dim);
            for (col, b) in basis.iter().enumerate() {
                acc = &acc + &b.scale_re(coeffs[(row, col)]);
            }
            acc
        })
        .collect()
}

impl OperatorFrame {
    /// Builds a frame from Hermitian elements; Gram matrix and frame bounds
    /// are computed on construction, no dual is attached.
    pub fn from_elements(
        kind: FrameKind,
        dim: usize,
        labels: Vec<FrameLabel>,
        elements: Vec<HsOperator>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("frame must have at least one element".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} elements",
                labels.len(),
                elements.len()
            )));
        }
        let coeffs = coefficient_matrix(dim, &elements)?;
        let gram = &coeffs * coeffs.transpose();
        let frame_matrix = coeffs.transpose() * &coeffs;
        let eig = nalgebra::SymmetricEigen::new(frame_matrix);
        let m = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let big_m = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            dim,
            kind,
            labels,
            elements,
            dual: None,
            coeffs,
            dual_coeffs: None,
            gram,
            bounds: (m.max(0.0), big_m),
        })
    }

    /// Attaches a dual family after checking the reconstruction identity on
    /// the full operator basis.
    pub fn with_dual(self, dual: Vec<HsOperator>) -> Result<Self> {
        self.with_dual_tol(dual, 1e-10)
    }

    pub fn with_dual_tol(mut self, dual: Vec<HsOperator>, tol: f64) -> Result<Self> {
        if dual.len() != self.elements.len() {
            return Err(Error::InvalidParameter(format!(
                "dual has {} elements, frame has {}",
                dual.len(),
                self.elements.len()
            )));
        }
        let dual_coeffs = coefficient_matrix(self.dim, &dual)?;
        let identity_check = dual_coeffs.transpose() * &self.coeffs;
        let residual = (&identity_check - DMatrix::<f64>::identity(self.dim * self.dim, self.dim * self.dim))
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::DualityViolation(residual));
        }
        self.dual = Some(dual);
        self.dual_coeffs = Some(dual_coeffs);
        Ok(self)
    }

    /// The Hermitian operator basis viewed as a Parseval frame (its own dual).
    pub fn orthonormal(dim: usize) -> Result<Self> {
        let basis = hermitian_basis(dim);
        Self::from_elements(FrameKind::Orthonormal, dim, canonical_labels(dim), basis.clone())?
            .with_dual(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[FrameLabel] {
        &self.labels
    }

    pub fn elements(&self) -> &[HsOperator] {
        &self.elements
    }

    pub fn dual(&self) -> Option<&[HsOperator]> {
        self.dual.as_deref()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Frame bounds `(m, M)`: the extreme eigenvalues of the frame map.
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// The frame map as a real symmetric `d^2 x d^2` matrix in the Hermitian
    /// operator basis.
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        self.coeffs.transpose() * &self.coeffs
    }

    /// `Xi[A] = sum_alpha (F_alpha, A) F_alpha`; accepts non-Hermitian `A`.
    pub fn frame_map_apply(&self, a: &HsOperator) -> Result<HsOperator> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "frame dim {} vs operator dim {}",
                self.dim,
                a.dim()
            )));
        }
        let mut acc = HsOperator::zeros(self.dim);
        for f in &self.elements {
            let w = hs_inner(f, a)?;
            acc = &acc + &f.scale(w);
        }
        Ok(acc)
    }

    /// Canonical dual elements `Xi^{-1}[F_alpha]`; fails when the frame map
    /// is singular within [`FRAME_SINGULARITY_TOL`].
    pub fn canonical_dual_ops(&self) -> Result<Vec<HsOperator>> {
        let eig = nalgebra::SymmetricEigen::new(self.frame_matrix());
        let m = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if m <= FRAME_SINGULARITY_TOL {
            return Err(Error::NotAFrame { bound: m, tol: FRAME_SINGULARITY_TOL });
        }
        let n = eig.eigenvalues.len();
        let inv_diag = DMatrix::<f64>::from_fn(n, n, |r, c| {
            if r == c { 1.0 / eig.eigenvalues[r] } else { 0.0 }
        });
        let xi_inv = &eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();
        let dual_coeffs = &self.coeffs * xi_inv;
        Ok(ops_from_coefficients(self.dim, &dual_coeffs))
    }

    /// The canonical dual frame: elements `Xi^{-1}[F_alpha]`, dual the
    /// original family, same labels.
    pub fn canonical_dual(&self) -> Result<OperatorFrame> {
        let dual_ops = self.canonical_dual_ops()?;
        OperatorFrame::from_elements(FrameKind::Custom, self.dim, self.labels.clone(), dual_ops)?
            .with_dual(self.elements.clone())
    }

    /// Replaces elements and dual keeping labels, revalidating duality at
    /// the certificate tolerance. Used by the OPD reduction, whose frame
    /// updates preserve the pairing up to roundoff amplified by the weight
    /// ratios.
    pub fn replaced(&self, elements: Vec<HsOperator>, dual: Vec<HsOperator>) -> Result<OperatorFrame> {
        OperatorFrame::from_elements(FrameKind::Custom, self.dim, self.labels.clone(), elements)?
            .with_dual_tol(dual, 1e-9)
    }

    /// Biorthogonality matrix `(D_alpha, F_beta)`.
    pub fn dual_primal_gram(&self) -> Result<DMatrix<f64>> {
        let dual_coeffs = self.dual_coeffs.as_ref().ok_or(Error::MissingDual)?;
        Ok(dual_coeffs * self.coeffs.transpose())
    }
}

/// Outcome of a duality check: worst Frobenius residual of the
/// reconstruction identity over a full operator basis.
#[derive(Debug, Clone, Copy)]
pub struct DualityCheck {
    pub ok: bool,
    pub max_residual: f64,
}

/// Checks `sum_alpha (F_alpha, E_i) D_alpha = E_i` over the Hermitian
/// operator basis `{E_i}`.
pub fn verify_duality(primal: &[HsOperator], dual: &[HsOperator], tol: f64) -> Result<DualityCheck> {
    if primal.len() != dual.len() {
        return Err(Error::InvalidParameter(format!(
            "primal has {} elements, dual has {}",
            primal.len(),
            dual.len()
        )));
    }
    if primal.is_empty() {
        return Err(Error::InvalidParameter("cannot verify an empty family".into()));
    }
    let dim = primal[0].dim();
    let mut worst: f64 = 0.0;
    for probe in hermitian_basis(dim) {
        let mut acc = HsOperator::zeros(dim);
        for (f, d) in primal.iter().zip(dual.iter()) {
            let w = hs_inner(f, &probe)?;
            acc = &acc + &d.scale(w);
        }
        worst = worst.max((&acc - &probe).hs_norm());
    }
    Ok(DualityCheck { ok: worst <= tol, max_residual: worst })
}

/// The positive frame built on the generalized Pauli basis, together with
/// its closed-form dual. Each element is positive semidefinite and the
/// `d^2` elements form a basis, so primal and dual are biorthogonal.
///
/// The off-diagonal sum inside the first dual element runs over every
/// ordered pair `k != j`, independent of the element's own indices; the
/// reconstruction identity fails under any narrower reading of that sum.
pub fn pauli_frame(d: usize) -> Result<OperatorFrame> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "Pauli frame requires d >= 2, got {d}"
        )));
    }
    let labels = canonical_labels(d);
    let h1 = diagonal_gellmann(d, 1);
    let sqrt_d = (d as f64).sqrt();

    let mut elements = Vec::with_capacity(d * d);
    let mut dual = Vec::with_capacity(d * d);

    // D_11 collects every diagonal generator and all off-diagonal ones.
    let mut d11 = h1.clone();
    for k in 2..=d {
        let w = sqrt_d * (((k - 1) as f64) / k as f64).sqrt();
        d11 = &d11 - &diagonal_gellmann(d, k).scale_re(w);
    }
    let off_weight = (d as f64 / 2.0).sqrt();
    for k in 1..=d {
        for j in 1..=d {
            if k != j {
                d11 = &d11 - &off_diagonal_generator(d, k, j).scale_re(off_weight);
            }
        }
    }

    for label in &labels {
        if label.is_diagonal() {
            if label.k == 1 {
                elements.push(h1.clone());
                dual.push(d11.clone());
            } else {
                let k = label.k;
                let w = sqrt_d * (((k - 1) as f64) / k as f64).sqrt();
                let hk = diagonal_gellmann(d, k);
                elements.push(&h1.scale_re(w) + &hk);
                dual.push(hk);
            }
        } else {
            let f = off_diagonal_generator(d, label.k, label.j);
            elements.push(&HsOperator::identity(d).scale_re(1.0 / 2.0_f64.sqrt()) + &f);
            dual.push(f);
        }
    }

    OperatorFrame::from_elements(FrameKind::Pauli, d, labels, elements)?.with_dual(dual)
}

/// The basis-induced positive family `P` and its completing family `Q`:
/// `P_kk = |k><k|`, `P_kj = 1/sqrt(2) + b_kj`, `Q_kj = b_kj`, and `Q_kk`
/// subtracts the sum of all off-diagonal basis elements. The summation in
/// `Q_kk` runs over every ordered off-diagonal pair, independent of `k`;
/// this is the reading under which the reconstruction identity holds.
pub fn basis_induced_family(d: usize) -> Result<OperatorFrame> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "basis-induced family requires d >= 2, got {d}"
        )));
    }
    let labels = canonical_labels(d);
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();

    let mut off_sum = HsOperator::zeros(d);
    for k in 1..=d {
        for j in 1..=d {
            if k != j {
                off_sum = &off_sum + &off_diagonal_generator(d, k, j);
            }
        }
    }

    let mut elements = Vec::with_capacity(d * d);
    let mut dual = Vec::with_capacity(d * d);
    for label in &labels {
        if label.is_diagonal() {
            let proj = HsOperator::basis_projector(d, label.k - 1);
            elements.push(proj.clone());
            dual.push(&proj - &off_sum.scale_re(inv_sqrt2));
        } else {
            let b = off_diagonal_generator(d, label.k, label.j);
            elements.push(&HsOperator::identity(d).scale_re(inv_sqrt2) + &b);
            dual.push(b);
        }
    }

    OperatorFrame::from_elements(FrameKind::BasisInduced, d, labels, elements)?.with_dual(dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::pauli_matrices;

    fn assert_close(a: &HsOperator, b: &HsOperator, tol: f64) {
        assert!(
            (a - b).hs_norm() < tol,
            "operators differ by {:.3e}",
            (a - b).hs_norm()
        );
    }

    #[test]
    fn hermitian_basis_d1_and_d2() {
        let b1 = hermitian_basis(1);
        assert_eq!(b1.len(), 1);
        assert_close(&b1[0], &HsOperator::identity(1), 1e-15);

        let b2 = hermitian_basis(2);
        let [_, sx, sy, _] = pauli_matrices();
        assert_close(&b2[0], &HsOperator::basis_projector(2, 0), 1e-15);
        assert_close(&b2[1], &HsOperator::basis_projector(2, 1), 1e-15);
        // canonical order: (1,2) -> sigma_y-like, (2,1) -> sigma_x-like
        assert_close(&b2[2], &sy.scale_re(1.0 / 2.0_f64.sqrt()), 1e-15);
        assert_close(&b2[3], &sx.scale_re(1.0 / 2.0_f64.sqrt()), 1e-15);
    }

    #[test]
    fn hermitian_basis_gram_is_identity() {
        for d in 1..=6 {
            let basis = hermitian_basis(d);
            for (i, a) in basis.iter().enumerate() {
                assert!(a.hermiticity_defect() < 1e-15);
                for (j, b) in basis.iter().enumerate() {
                    let g = hs_inner(a, b).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g - C64::new(expect, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gellmann_d2_is_pauli() {
        let basis = gellmann_basis(2).unwrap();
        let [id, sx, sy, sz] = pauli_matrices();
        let s = 1.0 / 2.0_f64.sqrt();
        assert_close(&basis[0], &id.scale_re(s), 1e-15);
        assert_close(&basis[1], &sz.scale_re(s), 1e-15);
        assert_close(&basis[2], &sy.scale_re(s), 1e-15);
        assert_close(&basis[3], &sx.scale_re(s), 1e-15);
    }

    #[test]
    fn gellmann_traces_and_gram() {
        for d in 2..=6 {
            let basis = gellmann_basis(d).unwrap();
            assert_eq!(basis.len(), d * d);
            assert!((basis[0].trace() - C64::new((d as f64).sqrt(), 0.0)).norm() < 1e-13);
            for op in basis.iter().skip(1) {
                assert!(op.trace().norm() < 1e-13);
                assert!(op.hermiticity_defect() < 1e-14);
            }
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((hs_inner(a, b).unwrap() - C64::new(expect, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn gellmann_rejects_d1() {
        assert!(gellmann_basis(1).is_err());
        assert!(pauli_frame(1).is_err());
        assert!(basis_induced_family(1).is_err());
    }

    #[test]
    fn pauli_frame_d2_closed_forms() {
        let frame = pauli_frame(2).unwrap();
        let [id, sx, sy, sz] = pauli_matrices();
        let s = 1.0 / 2.0_f64.sqrt();

        assert_close(&frame.elements()[0], &id.scale_re(s), 1e-14);
        assert_close(&frame.elements()[1], &HsOperator::basis_projector(2, 0).scale_re(2.0_f64.sqrt()), 1e-14);
        assert_close(&frame.elements()[2], &(&id + &sy).scale_re(s), 1e-14);
        assert_close(&frame.elements()[3], &(&id + &sx).scale_re(s), 1e-14);

        let dual = frame.dual().unwrap();
        let d0 = (&(&(&id - &sx) - &sy) - &sz).scale_re(s);
        assert_close(&dual[0], &d0, 1e-14);
        assert_close(&dual[1], &sz.scale_re(s), 1e-14);
        assert_close(&dual[2], &sy.scale_re(s), 1e-14);
        assert_close(&dual[3], &sx.scale_re(s), 1e-14);
    }

    #[test]
    fn pauli_frame_elements_positive() {
        for d in 2..=6 {
            let frame = pauli_frame(d).unwrap();
            for f in frame.elements() {
                assert!(f.min_eigenvalue() >= -1e-12);
            }
        }
        // at d = 2 the three non-identity elements touch zero
        let frame = pauli_frame(2).unwrap();
        for f in frame.elements().iter().skip(1) {
            assert!(f.min_eigenvalue().abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_frame_biorthogonal() {
        for d in 2..=6 {
            let frame = pauli_frame(d).unwrap();
            let gram = frame.dual_primal_gram().unwrap();
            let n = frame.len();
            for a in 0..n {
                for b in 0..n {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (gram[(a, b)] - expect).abs() < 1e-10,
                        "d={d}: gram[{a},{b}] = {}",
                        gram[(a, b)]
                    );
                }
            }
        }
    }

    #[test]
    fn pauli_dual_trace_pattern() {
        for d in 2..=6 {
            let frame = pauli_frame(d).unwrap();
            let dual = frame.dual().unwrap();
            assert!(dual[0].trace().norm() > 1e-10);
            for op in dual.iter().skip(1) {
                assert!(op.trace().norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn basis_induced_reconstruction_of_sigma_y() {
        let frame = basis_induced_family(2).unwrap();
        let [_, _, sy, _] = pauli_matrices();
        // only the (1,2) weight survives and equals sqrt(2)
        let weights: Vec<f64> = frame
            .elements()
            .iter()
            .map(|p| hs_inner(p, &sy).unwrap().re)
            .collect();
        assert!(weights[0].abs() < 1e-14);
        assert!(weights[1].abs() < 1e-14);
        assert!((weights[2] - 2.0_f64.sqrt()).abs() < 1e-14);
        assert!(weights[3].abs() < 1e-14);
        let rebuilt = frame.dual().unwrap()[2].scale_re(weights[2]);
        assert_close(&rebuilt, &sy, 1e-14);
    }

    #[test]
    fn basis_induced_reconstructs_projector() {
        let frame = basis_induced_family(2).unwrap();
        let target = HsOperator::basis_projector(2, 0);
        let mut acc = HsOperator::zeros(2);
        for (p, q) in frame.elements().iter().zip(frame.dual().unwrap()) {
            let w = hs_inner(p, &target).unwrap();
            acc = &acc + &q.scale(w);
        }
        assert_close(&acc, &target, 1e-12);
    }

    #[test]
    fn basis_induced_divergence_growth_law() {
        for d in 2..=6 {
            let frame = basis_induced_family(d).unwrap();
            for k in 0..d {
                let a = HsOperator::basis_projector(d, k);
                let total: f64 = frame
                    .elements()
                    .iter()
                    .map(|p| hs_inner(p, &a).unwrap().norm_sqr())
                    .sum();
                let expect = 1.0 + (d * (d - 1)) as f64 / 2.0;
                assert!((total - expect).abs() < 1e-12, "d={d}, k={k}: {total}");
            }
        }
    }

    #[test]
    fn frame_map_of_orthonormal_basis_is_identity() {
        let frame = OperatorFrame::orthonormal(3).unwrap();
        let (m, big_m) = frame.bounds();
        assert!((m - 1.0).abs() < 1e-12);
        assert!((big_m - 1.0).abs() < 1e-12);
        let probe = HsOperator::from_rows(
            3,
            &(0..9)
                .map(|i| C64::new(0.1 * i as f64, 0.05 * (i as f64 - 4.0)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mapped = frame.frame_map_apply(&probe).unwrap();
        assert_close(&mapped, &probe, 1e-12);
    }

    #[test]
    fn pauli_frame_bounds() {
        let frame = pauli_frame(2).unwrap();
        let (m, big_m) = frame.bounds();
        // 4x4 frame map eigenvalues: {1, 1, (5 +- sqrt(21))/2}
        let lo = (5.0 - 21.0_f64.sqrt()) / 2.0;
        let hi = (5.0 + 21.0_f64.sqrt()) / 2.0;
        assert!((m - lo).abs() < 1e-12);
        assert!((big_m - hi).abs() < 1e-12);
        assert!(m > 0.0);
    }

    #[test]
    fn basis_induced_upper_bound_grows() {
        for d in 2..=6 {
            let frame = basis_induced_family(d).unwrap();
            let (_, big_m) = frame.bounds();
            assert!(big_m >= 1.0 + (d * (d - 1)) as f64 / 2.0 - 1e-12);
        }
    }

    #[test]
    fn frame_bound_inequality_on_random_probes() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in 2..=4 {
            let frame = pauli_frame(d).unwrap();
            let (m, big_m) = frame.bounds();
            for _ in 0..20 {
                let a = crate::random::random_operator(d, &mut rng);
                let norm_sq = hs_inner(&a, &a).unwrap().re;
                let quad = hs_inner(&a, &frame.frame_map_apply(&a).unwrap()).unwrap().re;
                assert!(quad >= m * norm_sq - 1e-9);
                assert!(quad <= big_m * norm_sq + 1e-9);
            }
        }
    }

    #[test]
    fn canonical_dual_of_orthonormal_is_itself() {
        let frame = OperatorFrame::orthonormal(2).unwrap();
        let dual = frame.canonical_dual().unwrap();
        for (a, b) in frame.elements().iter().zip(dual.elements()) {
            assert_close(a, b, 1e-12);
        }
    }

    #[test]
    fn canonical_dual_matches_closed_form() {
        for d in 2..=5 {
            for frame in [pauli_frame(d).unwrap(), basis_induced_family(d).unwrap()] {
                let computed = frame.canonical_dual().unwrap();
                for (num, closed) in computed.elements().iter().zip(frame.dual().unwrap()) {
                    assert_close(num, closed, 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_family_is_not_a_frame() {
        let ops = vec![HsOperator::identity(2), HsOperator::identity(2)];
        let labels = vec![FrameLabel::new(1, 1), FrameLabel::new(2, 2)];
        let frame = OperatorFrame::from_elements(FrameKind::Custom, 2, labels, ops).unwrap();
        assert!(matches!(frame.canonical_dual_ops(), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn verify_duality_detects_corruption() {
        let frame = pauli_frame(4).unwrap();
        let check = verify_duality(frame.elements(), frame.dual().unwrap(), 1e-10).unwrap();
        assert!(check.ok);
        assert!(check.max_residual <= 1e-10);

        let frame5 = basis_induced_family(5).unwrap();
        let check5 = verify_duality(frame5.elements(), frame5.dual().unwrap(), 1e-10).unwrap();
        assert!(check5.ok);

        let mut corrupted = frame.dual().unwrap().to_vec();
        corrupted[2] = &corrupted[2] + &HsOperator::identity(4);
        let bad = verify_duality(frame.elements(), &corrupted, 1e-10).unwrap();
        assert!(!bad.ok);
        assert!(bad.max_residual > 0.1);
    }

    #[test]
    fn reconstruction_on_random_operators() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for d in 2..=6 {
            for frame in [pauli_frame(d).unwrap(), basis_induced_family(d).unwrap()] {
                for trial in 0..10 {
                    let a = if trial % 2 == 0 {
                        crate::random::random_hermitian(d, &mut rng)
                    } else {
                        crate::random::random_operator(d, &mut rng)
                    };
                    let mut acc = HsOperator::zeros(d);
                    for (f, dual) in frame.elements().iter().zip(frame.dual().unwrap()) {
                        let w = hs_inner(f, &a).unwrap();
                        acc = &acc + &dual.scale(w);
                    }
                    assert!((&acc - &a).hs_norm() < 1e-10);
                }
            }
        }
    }
}
