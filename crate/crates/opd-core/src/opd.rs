//! One-sided positive decompositions: construction from a positive frame,
//! reconstruction, reduction to the provable minimum number of terms, and the
//! cost/Schmidt-rank cross-check.
//!
//! A decomposition writes a bipartite state as `sum_a w_a D_a (x) rho_a`
//! with nonnegative weights and environmental density operators; the system
//! operators are the dual-frame elements and need not be positive. Reduction
//! removes terms whose environmental state is a real linear combination of
//! the others, updating the frame pair so duality and the represented state
//! are both preserved; the surviving term count equals the operator Schmidt
//! rank of the state.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frames::{hermitian_basis, verify_duality, FrameLabel, OperatorFrame};
use crate::hs::{hs_inner, schmidt_decompose, tensor, BipartiteOperator, HsOperator};

/// One weighted term `(w, D, rho)` of a decomposition, tagged with the label
/// of the frame element it came from.
#[derive(Debug, Clone)]
pub struct OpdTerm {
    pub weight: f64,
    pub label: FrameLabel,
    /// Dual-frame element; not necessarily positive.
    pub system_op: HsOperator,
    /// Environmental statistical operator.
    pub env_state: HsOperator,
}

/// Record of a single eliminated term.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub label: FrameLabel,
    /// Real coefficients expressing the eliminated environmental state over
    /// the retained ones; empty for terms dropped with vanishing weight.
    pub coefficients: Vec<(FrameLabel, f64)>,
}

/// Proof data accompanying a reduced decomposition: the updated frame pair,
/// the dependency coefficients, the residual weights of eliminated elements,
/// and the change-of-basis matrices tying the frame to the Schmidt operators
/// of the represented state.
#[derive(Debug, Clone)]
pub struct ReductionCertificate {
    pub original_count: usize,
    pub final_count: usize,
    pub eliminations: Vec<Elimination>,
    pub updated_primal: Vec<HsOperator>,
    pub updated_dual: Vec<HsOperator>,
    /// Trace norm of `Tr_S[(F_bar_beta (x) 1) rho]` for each eliminated beta,
    /// in elimination order; all must vanish within tolerance.
    pub eliminated_weight_norms: Vec<f64>,
    /// `q[(beta, alpha)] = (D_bar_beta, F_alpha)`: original primal elements
    /// expanded over the updated frame.
    pub cross_q: DMatrix<f64>,
    /// `f[(alpha, k)] = (G_k, F_bar_alpha)`: updated primal over the
    /// orthonormal system basis extending the Schmidt operators.
    pub cross_f: DMatrix<f64>,
    /// `g[(k, alpha)] = (D_bar_alpha, G_k)`: that basis over the updated frame.
    pub cross_g: DMatrix<f64>,
}

/// A one-sided positive decomposition of a bipartite state.
#[derive(Debug, Clone)]
pub struct Opd {
    pub dim_s: usize,
    pub dim_e: usize,
    pub terms: Vec<OpdTerm>,
    /// The frame that generated the decomposition; after [`reduce`] this is
    /// the updated pair from the certificate.
    pub frame: OperatorFrame,
    pub reduction: Option<ReductionCertificate>,
}

impl Opd {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// Decomposes a density operator over a frame with verified dual:
/// `w_a = Tr[(F_a^dag (x) 1) rho]` and `w_a rho_a = Tr_S[(F_a^dag (x) 1) rho]`.
/// Terms with vanishing weight get the maximally mixed environmental state.
pub fn decompose(rho: &BipartiteOperator, frame: &OperatorFrame, tol: f64) -> Result<Opd> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let dual = frame.dual().ok_or(Error::MissingDual)?;
    if rho.dim_s() != frame.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dim_s {}, frame has dim {}",
            rho.dim_s(),
            frame.dim()
        )));
    }
    if !rho.is_density(tol) {
        return Err(Error::NotADensity {
            trace: rho.trace().re,
            min_eig: rho.min_eigenvalue(),
        });
    }

    let dim_e = rho.dim_e();
    let ide = HsOperator::identity(dim_e);
    let mixed = ide.scale_re(1.0 / dim_e as f64);

    let mut terms = Vec::with_capacity(frame.len());
    for (idx, f) in frame.elements().iter().enumerate() {
        let lifted = tensor(&f.dagger(), &ide);
        let prod = BipartiteOperator::new(rho.dim_s(), dim_e, lifted.matrix() * rho.matrix())?;
        let env_op = prod.partial_trace_s();
        let weight = env_op.trace().re;

        if f.min_eigenvalue() < -1e-9 && env_op.trace_norm() > (10.0 * tol).max(1e-8) {
            return Err(Error::NonPositiveFrameElement {
                index: idx,
                norm: env_op.trace_norm(),
            });
        }
        if weight < -1e-12 {
            return Err(Error::NonPositiveFrameElement {
                index: idx,
                norm: weight.abs(),
            });
        }

        let env_state = if weight > tol {
            env_op.scale_re(1.0 / weight)
        } else {
            mixed.clone()
        };
        terms.push(OpdTerm {
            weight,
            label: frame.labels()[idx],
            system_op: dual[idx].clone(),
            env_state,
        });
    }

    Ok(Opd {
        dim_s: rho.dim_s(),
        dim_e,
        terms,
        frame: frame.clone(),
        reduction: None,
    })
}

/// `sum_a w_a D_a (x) rho_a`; the zero operator for an empty term list.
pub fn reconstruct(opd: &Opd) -> Result<BipartiteOperator> {
    let mut acc = BipartiteOperator::zeros(opd.dim_s, opd.dim_e);
    for term in &opd.terms {
        if term.system_op.dim() != opd.dim_s || term.env_state.dim() != opd.dim_e {
            return Err(Error::DimensionMismatch(format!(
                "term {} has dims ({}, {}), expected ({}, {})",
                term.label,
                term.system_op.dim(),
                term.env_state.dim(),
                opd.dim_s,
                opd.dim_e
            )));
        }
        acc = &acc + &tensor(&term.system_op, &term.env_state).scale_re(term.weight);
    }
    Ok(acc)
}

/// The represented reduced system state `sum_a w_a D_a`.
pub fn reduced_state(opd: &Opd) -> HsOperator {
    let mut acc = HsOperator::zeros(opd.dim_s);
    for term in &opd.terms {
        acc = &acc + &term.system_op.scale_re(term.weight);
    }
    acc
}

fn coeff_vector(op: &HsOperator, basis: &[HsOperator]) -> DVector<f64> {
    DVector::from_iterator(
        basis.len(),
        basis.iter().map(|b| hs_inner(b, op).unwrap().re),
    )
}

fn numerical_rank(rows: &[DVector<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = DMatrix::<f64>::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Orthonormal completion of `seed` to a full operator basis of dimension
/// `dim^2`, by Gram-Schmidt against the Hermitian basis.
fn complete_operator_basis(seed: &[HsOperator], dim: usize) -> Vec<HsOperator> {
    let mut out: Vec<HsOperator> = seed.to_vec();
    for cand in hermitian_basis(dim) {
        if out.len() == dim * dim {
            break;
        }
        let mut residual = cand;
        for b in &out {
            let overlap = hs_inner(b, &residual).unwrap();
            residual = &residual - &b.scale(overlap);
        }
        let norm = residual.hs_norm();
        if norm > 1e-8 {
            out.push(residual.scale_re(1.0 / norm));
        }
    }
    out
}

/// Reduces a decomposition to its minimal term count: the number of linearly
/// independent operators among `{w_a rho_a}`. Most-dependent terms (smallest
/// least-squares residual over the remaining ones) are eliminated first, ties
/// broken in favor of the highest canonical index; the frame pair is updated
/// at each step so duality and the represented state are preserved.
pub fn reduce(opd: &Opd, tol: f64) -> Result<Opd> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    for term in &opd.terms {
        if term.system_op.dim() != opd.dim_s || term.env_state.dim() != opd.dim_e {
            return Err(Error::DimensionMismatch(format!(
                "term {} has inconsistent dimensions",
                term.label
            )));
        }
    }
    let rho_src = reconstruct(opd)?;
    let frame_dual = opd.frame.dual().ok_or(Error::MissingDual)?;
    let basis_e = hermitian_basis(opd.dim_e);

    let frame_index: std::collections::HashMap<FrameLabel, usize> = opd
        .frame
        .labels()
        .iter()
        .copied()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    for term in &opd.terms {
        if !frame_index.contains_key(&term.label) {
            return Err(Error::InvalidParameter(format!(
                "term label {} not present in the source frame",
                term.label
            )));
        }
    }

    let mut primal = opd.frame.elements().to_vec();
    let mut dual = frame_dual.to_vec();
    let mut terms = opd.terms.clone();
    let mut eliminations = Vec::new();

    // Weighted environmental rows decide the target rank.
    let weighted_rows: Vec<DVector<f64>> = terms
        .iter()
        .map(|t| coeff_vector(&t.env_state.scale_re(t.weight), &basis_e))
        .collect();
    let target_rank = numerical_rank(&weighted_rows, tol);

    // Vanishing-weight terms go first; their updates are identically zero.
    let mut retained: Vec<usize> = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        if t.weight > tol {
            retained.push(i);
        } else {
            eliminations.push(Elimination { label: t.label, coefficients: vec![] });
        }
    }

    while retained.len() > target_rank {
        // Most dependent first: smallest residual of rho_beta over the rest.
        let mut best: Option<(f64, usize, DVector<f64>)> = None;
        for (pos, &cand) in retained.iter().enumerate() {
            let others: Vec<usize> = retained
                .iter()
                .copied()
                .filter(|&i| i != cand)
                .collect();
            let a = DMatrix::<f64>::from_fn(basis_e.len(), others.len(), |r, c| {
                coeff_vector(&terms[others[c]].env_state, &basis_e)[r]
            });
            let b = coeff_vector(&terms[cand].env_state, &basis_e);
            let svd = a.clone().svd(true, true);
            let x = svd
                .solve(&b, 1e-14)
                .map_err(|e| Error::Inconsistency(format!("least-squares failure: {e}")))?;
            let residual = (&a * &x - &b).norm();
            let better = match &best {
                None => true,
                Some((r, _, _)) => residual <= *r,
            };
            if better {
                best = Some((residual, pos, x));
            }
        }
        let (_, victim_pos, coeffs) = best.expect("retained set is non-empty");
        let victim = retained[victim_pos];
        let others: Vec<usize> = retained
            .iter()
            .copied()
            .filter(|&i| i != victim)
            .collect();

        let w_victim = terms[victim].weight;
        let victim_frame_idx = frame_index[&terms[victim].label];
        let d_victim = dual[victim_frame_idx].clone();
        let mut primal_update = HsOperator::zeros(opd.dim_s);
        let mut coefficient_log = Vec::with_capacity(others.len());
        for (c_idx, &other) in others.iter().enumerate() {
            let c = coeffs[c_idx];
            let ratio = w_victim / terms[other].weight;
            let other_frame_idx = frame_index[&terms[other].label];
            // D_bar_a = D_a + (w_N / w_a) c_a D_N
            let updated = &dual[other_frame_idx] + &d_victim.scale_re(ratio * c);
            dual[other_frame_idx] = updated.clone();
            terms[other].system_op = updated;
            // accumulates  sum_a (w_N / w_a) c_a F_a
            primal_update = &primal_update + &primal[other_frame_idx].scale_re(ratio * c);
            coefficient_log.push((terms[other].label, c));
        }
        primal[victim_frame_idx] = &primal[victim_frame_idx] - &primal_update;
        eliminations.push(Elimination {
            label: terms[victim].label,
            coefficients: coefficient_log,
        });
        retained.remove(victim_pos);
    }

    // Certificate checks and cross-coefficient data.
    let duality = verify_duality(&primal, &dual, 1e-9)?;
    if !duality.ok {
        return Err(Error::Inconsistency(format!(
            "updated frame pair lost duality (residual {:.3e})",
            duality.max_residual
        )));
    }

    let ide = HsOperator::identity(opd.dim_e);
    let eliminated_weight_norms: Vec<f64> = eliminations
        .iter()
        .map(|e| {
            let idx = frame_index[&e.label];
            let lifted = tensor(&primal[idx].dagger(), &ide);
            BipartiteOperator::new(opd.dim_s, opd.dim_e, lifted.matrix() * rho_src.matrix())
                .map(|p| p.partial_trace_s().trace_norm())
        })
        .collect::<Result<_>>()?;

    let schmidt = schmidt_decompose(&rho_src, tol)?;
    let sys_basis = complete_operator_basis(&schmidt.system_ops, opd.dim_s);
    let n_frame = primal.len();
    let n_basis = sys_basis.len();
    let cross_q = DMatrix::<f64>::from_fn(n_frame, n_frame, |b, a| {
        hs_inner(&dual[b], &opd.frame.elements()[a]).unwrap().re
    });
    let cross_f = DMatrix::<f64>::from_fn(n_frame, n_basis, |a, k| {
        hs_inner(&sys_basis[k], &primal[a]).unwrap().re
    });
    let cross_g = DMatrix::<f64>::from_fn(n_basis, n_frame, |k, a| {
        hs_inner(&dual[a], &sys_basis[k]).unwrap().re
    });

    let certificate = ReductionCertificate {
        original_count: opd.terms.len(),
        final_count: retained.len(),
        eliminations,
        updated_primal: primal.clone(),
        updated_dual: dual.clone(),
        eliminated_weight_norms,
        cross_q,
        cross_f,
        cross_g,
    };

    let reduced = Opd {
        dim_s: opd.dim_s,
        dim_e: opd.dim_e,
        terms: retained.into_iter().map(|i| terms[i].clone()).collect(),
        frame: opd.frame.replaced(primal, dual)?,
        reduction: Some(certificate),
    };

    let residual = (&reconstruct(&reduced)? - &rho_src).hs_norm();
    if residual > 10.0 * tol * rho_src.hs_norm().max(1.0) {
        return Err(Error::Inconsistency(format!(
            "reduced decomposition drifted from its source by {residual:.3e}"
        )));
    }
    Ok(reduced)
}

/// The cost of the state: the reduced term count of its Pauli-frame
/// decomposition, cross-checked against the operator Schmidt rank. The two
/// must agree; a mismatch is reported as an error rather than silently
/// returning either value.
pub fn cost(rho: &BipartiteOperator, tol: f64) -> Result<usize> {
    let frame = crate::frames::pauli_frame(rho.dim_s())?;
    let opd = decompose(rho, &frame, tol)?;
    let reduced = reduce(&opd, tol)?;
    let n = reduced.term_count();
    let rank = schmidt_decompose(rho, tol)?.rank;
    if n != rank {
        return Err(Error::CostMismatch { reduced: n, schmidt: rank });
    }
    Ok(n)
}
