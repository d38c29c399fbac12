//! CPTP evolution: qubit Pauli-channel semigroups, term-wise propagation of a
//! decomposition, and the exact global-unitary cross-check.
//!
//! A Pauli channel acts as `phi(t)[A] = sum_j p_j(t) sigma_j A sigma_j`; its
//! eigenvalues on the Pauli basis decay exponentially with the pairwise rate
//! sums, and the probability vector is the Hadamard transform of the
//! eigenvalue vector. Channels are assigned to decomposition terms by
//! canonical frame index: the term labelled `(1,1)` is evolved by channel 0,
//! `(2,2)` by channel 1, `(1,2)` by channel 2 and `(2,1)` by channel 3.

use crate::error::{Error, Result};
use crate::frames::canonical_labels;
use crate::hs::{
    pauli_matrices, tensor, unitary_from_hamiltonian, BipartiteOperator, CMatrix, HsOperator,
};
use crate::opd::Opd;

const HADAMARD4: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// A single qubit Pauli-channel semigroup with constant nonnegative rates
/// `(gamma_1, gamma_2, gamma_3)` on the three Pauli directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    rates: [f64; 3],
}

impl PauliChannel {
    pub fn new(rates: [f64; 3]) -> Result<Self> {
        for (j, g) in rates.iter().enumerate() {
            if !g.is_finite() || *g < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "rate gamma_{} must be finite and nonnegative, got {g}",
                    j + 1
                )));
            }
        }
        Ok(Self { rates })
    }

    pub fn rates(&self) -> [f64; 3] {
        self.rates
    }

    /// Map eigenvalues on `(sigma_0, sigma_1, sigma_2, sigma_3)`:
    /// `lambda_0 = 1`, `lambda_j = exp(-2 (gamma_k + gamma_m) t)`.
    pub fn eigenvalues(&self, t: f64) -> [f64; 4] {
        let [g1, g2, g3] = self.rates;
        [
            1.0,
            (-2.0 * (g2 + g3) * t).exp(),
            (-2.0 * (g1 + g3) * t).exp(),
            (-2.0 * (g1 + g2) * t).exp(),
        ]
    }

    /// Mixing probabilities `p = H_4 lambda / 4`.
    pub fn probabilities(&self, t: f64) -> [f64; 4] {
        let lam = self.eigenvalues(t);
        let mut p = [0.0; 4];
        for (row, h) in HADAMARD4.iter().enumerate() {
            p[row] = h.iter().zip(lam.iter()).map(|(a, b)| a * b).sum::<f64>() / 4.0;
        }
        p
    }

    pub fn apply(&self, t: f64, a: &HsOperator) -> Result<HsOperator> {
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
        }
        if a.dim() != 2 {
            return Err(Error::InvalidDimension(format!(
                "Pauli channels act on qubits, got dim {}",
                a.dim()
            )));
        }
        let p = self.probabilities(t);
        let sigmas = pauli_matrices();
        let mut acc = HsOperator::zeros(2);
        for (pj, s) in p.iter().zip(sigmas.iter()) {
            acc = &acc + &(&(s * a) * s).scale_re(*pj);
        }
        Ok(acc)
    }

    /// Choi matrix `sum_ij phi[|i><j|] (x) |i><j|`.
    pub fn choi(&self, t: f64) -> Result<BipartiteOperator> {
        let mut acc = BipartiteOperator::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let unit = HsOperator::matrix_unit(2, i, j);
                let mapped = self.apply(t, &unit)?;
                acc = &acc + &tensor(&mapped, &unit);
            }
        }
        Ok(acc)
    }
}

/// The four channels paired with the four canonical frame indices of a
/// qubit decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannelFamily {
    channels: [PauliChannel; 4],
}

impl PauliChannelFamily {
    pub fn new(rates: [[f64; 3]; 4]) -> Result<Self> {
        Ok(Self {
            channels: [
                PauliChannel::new(rates[0])?,
                PauliChannel::new(rates[1])?,
                PauliChannel::new(rates[2])?,
                PauliChannel::new(rates[3])?,
            ],
        })
    }

    /// One common channel for every term.
    pub fn uniform(rates: [f64; 3]) -> Result<Self> {
        Self::new([rates; 4])
    }

    /// The two-map setup: `phi` (rates `gamma`) on the trace-carrying term,
    /// `phi~` (rates `gamma_tilde`) on the three others.
    pub fn two_map(gamma: [f64; 3], gamma_tilde: [f64; 3]) -> Result<Self> {
        Self::new([gamma, gamma_tilde, gamma_tilde, gamma_tilde])
    }

    pub fn channel(&self, alpha: usize) -> Result<&PauliChannel> {
        self.channels
            .get(alpha)
            .ok_or_else(|| Error::InvalidParameter(format!("channel index {alpha} out of range 0..4")))
    }

    pub fn channels(&self) -> &[PauliChannel; 4] {
        &self.channels
    }

    /// Mean of the strictly positive rates over all channels; 0 when every
    /// rate vanishes.
    pub fn mean_nonzero_rate(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for ch in &self.channels {
            for g in ch.rates {
                if g > 0.0 {
                    total += g;
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }
}

/// `phi_alpha(t)[A]`.
pub fn channel_apply(
    family: &PauliChannelFamily,
    alpha: usize,
    t: f64,
    a: &HsOperator,
) -> Result<HsOperator> {
    family.channel(alpha)?.apply(t, a)
}

/// Worst deviation of `phi(t+s)` from `phi(t) . phi(s)` over an operator
/// basis; vanishes for semigroups.
pub fn semigroup_compose_check(
    family: &PauliChannelFamily,
    alpha: usize,
    t: f64,
    s: f64,
) -> Result<f64> {
    if t < 0.0 || s < 0.0 {
        return Err(Error::InvalidParameter("times must be nonnegative".into()));
    }
    let ch = family.channel(alpha)?;
    let mut worst: f64 = 0.0;
    for probe in crate::frames::hermitian_basis(2) {
        let direct = ch.apply(t + s, &probe)?;
        let composed = ch.apply(t, &ch.apply(s, &probe)?)?;
        worst = worst.max((&direct - &composed).hs_norm());
    }
    Ok(worst)
}

/// Result of propagating a decomposition: the evolved matrix and its minimum
/// eigenvalue. Positivity is not guaranteed, which is the point of tracking
/// the eigenvalue.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: HsOperator,
    pub min_eigenvalue: f64,
}

/// `sum_a w_a phi_a(t)[D_a]` with channels assigned by canonical index.
pub fn evolve_opd(opd: &Opd, family: &PauliChannelFamily, t: f64) -> Result<Evolved> {
    if opd.dim_s != 2 {
        return Err(Error::InvalidDimension(format!(
            "Pauli-channel propagation requires dim_s = 2, got {}",
            opd.dim_s
        )));
    }
    if opd.terms.len() > 4 {
        return Err(Error::InvalidParameter(format!(
            "{} terms for 4 channels",
            opd.terms.len()
        )));
    }
    let order = canonical_labels(2);
    let mut acc = HsOperator::zeros(2);
    for term in &opd.terms {
        let alpha = order
            .iter()
            .position(|l| *l == term.label)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("term label {} has no channel", term.label))
            })?;
        let moved = family.channel(alpha)?.apply(t, &term.system_op)?;
        acc = &acc + &moved.scale_re(term.weight);
    }
    let min_eigenvalue = acc.min_eigenvalue();
    Ok(Evolved { state: acc, min_eigenvalue })
}

/// A joint Hamiltonian and initial state defining exact reduced dynamics.
#[derive(Debug, Clone)]
pub struct MicroscopicModel {
    hamiltonian: BipartiteOperator,
    initial: BipartiteOperator,
}

impl MicroscopicModel {
    pub fn new(hamiltonian: BipartiteOperator, initial: BipartiteOperator, tol: f64) -> Result<Self> {
        if hamiltonian.dim_s() != initial.dim_s() || hamiltonian.dim_e() != initial.dim_e() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian on {}x{}, state on {}x{}",
                hamiltonian.dim_s(),
                hamiltonian.dim_e(),
                initial.dim_s(),
                initial.dim_e()
            )));
        }
        if hamiltonian.hermiticity_defect() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian is not Hermitian (defect {:.3e})",
                hamiltonian.hermiticity_defect()
            )));
        }
        if !initial.is_density(tol) {
            return Err(Error::NotADensity {
                trace: initial.trace().re,
                min_eig: initial.min_eigenvalue(),
            });
        }
        Ok(Self { hamiltonian, initial })
    }

    pub fn dim_s(&self) -> usize {
        self.hamiltonian.dim_s()
    }

    pub fn dim_e(&self) -> usize {
        self.hamiltonian.dim_e()
    }

    pub fn hamiltonian(&self) -> &BipartiteOperator {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &BipartiteOperator {
        &self.initial
    }

    /// `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        unitary_from_hamiltonian(self.hamiltonian.matrix(), t)
    }
}

/// The map induced by an environmental state:
/// `Phi(t)[A] = Tr_E[U(t) (A (x) rho_alpha) U(t)^dag]`.
pub fn microscopic_map(
    model: &MicroscopicModel,
    rho_alpha: &HsOperator,
    t: f64,
    a: &HsOperator,
) -> Result<HsOperator> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if a.dim() != model.dim_s() || rho_alpha.dim() != model.dim_e() {
        return Err(Error::DimensionMismatch(format!(
            "map expects dims ({}, {}), got ({}, {})",
            model.dim_s(),
            model.dim_e(),
            a.dim(),
            rho_alpha.dim()
        )));
    }
    let u = model.unitary(t);
    let lifted = tensor(a, rho_alpha);
    Ok(lifted.conjugate_by(&u).partial_trace_e())
}

/// `Tr_E[U(t) rho_SE U(t)^dag]`.
pub fn exact_reduced_evolution(model: &MicroscopicModel, t: f64) -> Result<HsOperator> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let u = model.unitary(t);
    Ok(model.initial.conjugate_by(&u).partial_trace_e())
}

/// `t = 0` followed by `points` log-spaced times on
/// `[1e-3 / rate, 10 / rate]`.
pub fn default_time_grid(mean_rate: f64, points: usize) -> Vec<f64> {
    let rate = if mean_rate > 0.0 { mean_rate } else { 1.0 };
    let lo = (1e-3 / rate).ln();
    let hi = (10.0 / rate).ln();
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    if points == 1 {
        grid.push(10.0 / rate);
        return grid;
    }
    for i in 0..points {
        let f = i as f64 / (points - 1) as f64;
        grid.push((lo + f * (hi - lo)).exp());
    }
    grid
}

/// One row of an evolved-state trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub bloch: [f64; 3],
    pub min_eigenvalue: f64,
}

/// Propagates a decomposition over a time grid.
pub fn trajectory(
    opd: &Opd,
    family: &PauliChannelFamily,
    times: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    times
        .iter()
        .map(|&t| {
            let evolved = evolve_opd(opd, family, t)?;
            Ok(TrajectoryPoint {
                t,
                bloch: evolved.state.bloch_vector()?,
                min_eigenvalue: evolved.min_eigenvalue,
            })
        })
        .collect()
}
