//! Dense complex-matrix foundation: Hilbert-Schmidt geometry, tensor
//! products, partial traces, spectral predicates, and the operator Schmidt
//! decomposition.
//!
//! Index convention for joint-space operators: the row index of a
//! [`BipartiteOperator`] is `s * dim_e + e` (system-major). Every module of
//! the crate inherits this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::frames::hermitian_basis;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default relative tolerance for spectral predicates and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A dense complex square matrix viewed as a Hilbert-Schmidt operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HsOperator {
    dim: usize,
    m: CMatrix,
}

impl HsOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension("operator dimension must be >= 1".into()));
        }
        Ok(Self { dim: m.nrows(), m })
    }

    /// Builds from a row-major list of entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            dim,
            m: CMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, m: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, m: CMatrix::identity(dim, dim) }
    }

    /// The rank-one projector `|k><k|` (zero-based `k`).
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { dim, m }
    }

    /// `|k><j|` (zero-based indices).
    pub fn matrix_unit(dim: usize, k: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, j)] = C64::new(1.0, 0.0);
        Self { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self { dim: self.dim, m: self.m.adjoint() }
    }

    /// Entrywise transpose in the computational basis.
    pub fn transpose(&self) -> Self {
        Self { dim: self.dim, m: self.m.transpose() }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry distance to the adjoint; 0 for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.m.adjoint();
        (&self.m - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(A + A^dag)/2`.
    pub fn hermitian_part(&self) -> Self {
        let h = (&self.m + self.m.adjoint()).scale(0.5);
        Self { dim: self.dim, m: h }
    }

    /// Real eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        let eig = nalgebra::SymmetricEigen::new(h.m);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Minimum eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Sum of absolute eigenvalues of the Hermitian part.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }

    /// Positivity check: minimum eigenvalue of the Hermitian part >= -tol.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Density-operator check: Hermitian, positive, unit trace within `tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self.is_positive(tol)
            && (self.trace() - C64::new(1.0, 0.0)).norm() <= tol
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dim: self.dim, m: self.m.map(|z| z * factor) }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `U self U^dag`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self { dim: self.dim, m: u * &self.m * u.adjoint() }
    }

    /// Bloch components `Re Tr[self sigma_j]`, j = x, y, z (qubit only).
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim != 2 {
            return Err(Error::InvalidDimension(format!(
                "Bloch vector requires dim 2, got {}",
                self.dim
            )));
        }
        let [_, sx, sy, sz] = pauli_matrices();
        Ok([
            (&self.m * sx.matrix()).trace().re,
            (&self.m * sy.matrix()).trace().re,
            (&self.m * sz.matrix()).trace().re,
        ])
    }
}

impl std::ops::Add for &HsOperator {
    type Output = HsOperator;
    fn add(self, rhs: &HsOperator) -> HsOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        HsOperator { dim: self.dim, m: &self.m + &rhs.m }
    }
}

impl std::ops::Sub for &HsOperator {
    type Output = HsOperator;
    fn sub(self, rhs: &HsOperator) -> HsOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        HsOperator { dim: self.dim, m: &self.m - &rhs.m }
    }
}

impl std::ops::Mul for &HsOperator {
    type Output = HsOperator;
    fn mul(self, rhs: &HsOperator) -> HsOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        HsOperator { dim: self.dim, m: &self.m * &rhs.m }
    }
}

/// The Hilbert-Schmidt scalar product `Tr[A^dag B]`.
pub fn hs_inner(a: &HsOperator, b: &HsOperator) -> Result<C64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner: {} vs {}",
            a.dim, b.dim
        )));
    }
    Ok((a.m.adjoint() * &b.m).trace())
}

/// `[identity, sigma_x, sigma_y, sigma_z]`.
pub fn pauli_matrices() -> [HsOperator; 4] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        HsOperator::identity(2),
        HsOperator::from_rows(2, &[z, one, one, z]).unwrap(),
        HsOperator::from_rows(2, &[z, -i, i, z]).unwrap(),
        HsOperator::from_rows(2, &[one, z, z, -one]).unwrap(),
    ]
}

/// A dense operator on a bipartite space `H_S (x) H_E`, stored in the
/// system-major convention (row index `s * dim_e + e`).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dim_s: usize,
    dim_e: usize,
    m: CMatrix,
}

impl BipartiteOperator {
    pub fn new(dim_s: usize, dim_e: usize, m: CMatrix) -> Result<Self> {
        let total = dim_s * dim_e;
        if m.nrows() != m.ncols() || m.nrows() != total {
            return Err(Error::NonFactoringDimensions {
                total: m.nrows(),
                dim_s,
                dim_e,
            });
        }
        if total == 0 {
            return Err(Error::InvalidDimension("bipartite dimensions must be >= 1".into()));
        }
        Ok(Self { dim_s, dim_e, m })
    }

    pub fn zeros(dim_s: usize, dim_e: usize) -> Self {
        Self { dim_s, dim_e, m: CMatrix::zeros(dim_s * dim_e, dim_s * dim_e) }
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn total_dim(&self) -> usize {
        self.dim_s * self.dim_e
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Forgets the tensor split.
    pub fn to_operator(&self) -> HsOperator {
        HsOperator { dim: self.total_dim(), m: self.m.clone() }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn hs_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.to_operator().hermiticity_defect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.to_operator().min_eigenvalue()
    }

    pub fn is_density(&self, tol: f64) -> bool {
        self.to_operator().is_density(tol)
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        Self {
            dim_s: self.dim_s,
            dim_e: self.dim_e,
            m: self.m.map(|z| z * factor),
        }
    }

    /// `U self U^dag` on the joint space.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self {
            dim_s: self.dim_s,
            dim_e: self.dim_e,
            m: u * &self.m * u.adjoint(),
        }
    }

    /// Traces out the environment: `(Tr_E O)_{s,s'} = sum_e O_{(s,e),(s',e)}`.
    pub fn partial_trace_e(&self) -> HsOperator {
        let (ds, de) = (self.dim_s, self.dim_e);
        let mut out = CMatrix::zeros(ds, ds);
        for s in 0..ds {
            for sp in 0..ds {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..de {
                    acc += self.m[(s * de + e, sp * de + e)];
                }
                out[(s, sp)] = acc;
            }
        }
        HsOperator { dim: ds, m: out }
    }

    /// Traces out the system: `(Tr_S O)_{e,e'} = sum_s O_{(s,e),(s,e')}`.
    pub fn partial_trace_s(&self) -> HsOperator {
        let (ds, de) = (self.dim_s, self.dim_e);
        let mut out = CMatrix::zeros(de, de);
        for e in 0..de {
            for ep in 0..de {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..ds {
                    acc += self.m[(s * de + e, s * de + ep)];
                }
                out[(e, ep)] = acc;
            }
        }
        HsOperator { dim: de, m: out }
    }
}

impl std::ops::Add for &BipartiteOperator {
    type Output = BipartiteOperator;
    fn add(self, rhs: &BipartiteOperator) -> BipartiteOperator {
        assert_eq!((self.dim_s, self.dim_e), (rhs.dim_s, rhs.dim_e));
        BipartiteOperator {
            dim_s: self.dim_s,
            dim_e: self.dim_e,
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &BipartiteOperator {
    type Output = BipartiteOperator;
    fn sub(self, rhs: &BipartiteOperator) -> BipartiteOperator {
        assert_eq!((self.dim_s, self.dim_e), (rhs.dim_s, rhs.dim_e));
        BipartiteOperator {
            dim_s: self.dim_s,
            dim_e: self.dim_e,
            m: &self.m - &rhs.m,
        }
    }
}

/// Kronecker product `A (x) B` under the system-major convention.
pub fn tensor(a: &HsOperator, b: &HsOperator) -> BipartiteOperator {
    BipartiteOperator {
        dim_s: a.dim,
        dim_e: b.dim,
        m: a.m.kronecker(&b.m),
    }
}

/// Spectral decomposition of the Hermitian part: `(eigenvalues, eigenvectors)`
/// with columns of the returned matrix the orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    (eig.eigenvalues, eig.eigenvectors)
}

/// `exp(-i H t)` for Hermitian `H`, via spectral decomposition.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&w| (C64::new(0.0, -w * t)).exp()),
    ));
    &vecs * phases * vecs.adjoint()
}

/// An operator Schmidt decomposition `O = sum_k lambda_k G_k^S (x) G_k^E`.
///
/// The coefficients are positive and descending; for Hermitian input the
/// factors are Hermitian and orthonormal under the Hilbert-Schmidt product.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub system_ops: Vec<HsOperator>,
    pub env_ops: Vec<HsOperator>,
    pub rank: usize,
    pub tolerance: f64,
}

impl SchmidtDecomposition {
    /// `sum_k lambda_k G_k^S (x) G_k^E`.
    pub fn reconstruct(&self, dim_s: usize, dim_e: usize) -> BipartiteOperator {
        let mut acc = BipartiteOperator::zeros(dim_s, dim_e);
        for k in 0..self.rank {
            let term = tensor(&self.system_ops[k], &self.env_ops[k]).scale_re(self.coefficients[k]);
            acc = &acc + &term;
        }
        acc
    }
}

/// Operator Schmidt decomposition by realignment.
///
/// The operator is expanded on the Hermitian operator bases of the two
/// factors; the resulting coefficient matrix is realigned to shape
/// `dim_s^2 x dim_e^2` and decomposed by SVD. Hermitian inputs give a real
/// coefficient matrix, so the Schmidt operators come out Hermitian. The rank
/// counts singular values above `tol` relative to the largest one.
pub fn schmidt_decompose(o: &BipartiteOperator, tol: f64) -> Result<SchmidtDecomposition> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (ds, de) = (o.dim_s, o.dim_e);
    let bs = hermitian_basis(ds);
    let be = hermitian_basis(de);

    // Coefficients Tr[(B_i (x) B_m) O]; real up to roundoff for Hermitian O.
    let mut coeff = DMatrix::<C64>::zeros(ds * ds, de * de);
    for (i, bi) in bs.iter().enumerate() {
        for (m_idx, bm) in be.iter().enumerate() {
            let basis_op = tensor(bi, bm);
            coeff[(i, m_idx)] = (basis_op.m.adjoint() * &o.m).trace();
        }
    }

    let scale = coeff.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let max_imag = coeff.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let (sigmas, sys_cols, env_cols): (Vec<f64>, Vec<Vec<C64>>, Vec<Vec<C64>>) =
        if max_imag <= 1e-9 * scale {
            let real = DMatrix::<f64>::from_fn(ds * ds, de * de, |r, c| coeff[(r, c)].re);
            let svd = real.svd(true, true);
            let u = svd.u.as_ref().expect("svd with u");
            let vt = svd.v_t.as_ref().expect("svd with v_t");
            let sig: Vec<f64> = svd.singular_values.iter().copied().collect();
            let us = (0..sig.len())
                .map(|k| (0..ds * ds).map(|i| C64::new(u[(i, k)], 0.0)).collect())
                .collect();
            let vs = (0..sig.len())
                .map(|k| (0..de * de).map(|m| C64::new(vt[(k, m)], 0.0)).collect())
                .collect();
            (sig, us, vs)
        } else {
            let svd = coeff.clone().svd(true, true);
            let u = svd.u.as_ref().expect("svd with u");
            let vt = svd.v_t.as_ref().expect("svd with v_t");
            let sig: Vec<f64> = svd.singular_values.iter().copied().collect();
            let us = (0..sig.len())
                .map(|k| (0..ds * ds).map(|i| u[(i, k)]).collect())
                .collect();
            // rows of V^H conjugated back to columns of V
            let vs = (0..sig.len())
                .map(|k| (0..de * de).map(|m| vt[(k, m)].conj()).collect())
                .collect();
            (sig, us, vs)
        };

    let sigma_max = sigmas.iter().copied().fold(0.0, f64::max);
    let keep = sigmas
        .iter()
        .take_while(|&&s| s > tol * sigma_max)
        .count();

    let mut coefficients = Vec::with_capacity(keep);
    let mut system_ops = Vec::with_capacity(keep);
    let mut env_ops = Vec::with_capacity(keep);
    for k in 0..keep {
        coefficients.push(sigmas[k]);
        let mut gs = CMatrix::zeros(ds, ds);
        for (i, bi) in bs.iter().enumerate() {
            gs += bi.m.map(|z| z * sys_cols[k][i]);
        }
        let mut ge = CMatrix::zeros(de, de);
        for (m_idx, bm) in be.iter().enumerate() {
            // complex path: conj on the env side pairs with Tr[(B (x) B)^dag O]
            ge += bm.m.map(|z| z * env_cols[k][m_idx].conj());
        }
        system_ops.push(HsOperator { dim: ds, m: gs });
        env_ops.push(HsOperator { dim: de, m: ge });
    }

    Ok(SchmidtDecomposition {
        coefficients,
        system_ops,
        env_ops,
        rank: keep,
        tolerance: tol,
    })
}
