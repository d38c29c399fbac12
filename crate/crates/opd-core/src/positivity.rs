//! Positivity-domain geometry for the two-map qubit semigroup setup: the
//! v-parametrization of initial states, the initial positivity ball, the
//! evolved ellipsoid/ball conditions, trajectory classification, and
//! ellipsoid-in-ball containment analysis.
//!
//! An initial reduced state is encoded by `v = (v1, v2, v3)` with the
//! trace-carrying weight fixed to one; admissible initial states form the
//! unit ball centered at `(1,1,1)`. Under the two-map evolution the image of
//! that ball at time `t` is the axis-aligned ellipsoid centered at
//! `lambda~(t)` with semi-axes `lambda~(t)`, while the positivity condition
//! becomes membership in the unit ball centered at `lambda(t)`. The violation
//! `g(t) = sum_j (lambda_j - lambda~_j v_j)^2` exceeds one exactly when the
//! evolved matrix has a negative eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{canonical_labels, pauli_frame};
use crate::hs::{pauli_matrices, HsOperator};
use crate::opd::{Opd, OpdTerm};

/// Half-width of the band around `g = 1` reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Absolute time tolerance for exit/reentry bisection.
pub const TIME_TOL: f64 = 1e-9;

/// Rates of the two-map setup: `gamma` drives the channel acting on the
/// trace-carrying term, `gamma_tilde` the common channel on the three others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoMapRates {
    pub gamma: [f64; 3],
    pub gamma_tilde: [f64; 3],
}

impl TwoMapRates {
    pub fn new(gamma: [f64; 3], gamma_tilde: [f64; 3]) -> Result<Self> {
        for g in gamma.iter().chain(gamma_tilde.iter()) {
            if !g.is_finite() || *g < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "rates must be finite and nonnegative, got {g}"
                )));
            }
        }
        Ok(Self { gamma, gamma_tilde })
    }

    /// `gamma_1 = gamma~_1 = 0`, `gamma_2 = gamma_3 = 2 gamma~_2 = 2 gamma~_3`:
    /// every eigenvalue decays, the ellipsoid shrinks to a point.
    pub fn example_i(gamma: f64) -> Result<Self> {
        Self::new([0.0, gamma, gamma], [0.0, gamma / 2.0, gamma / 2.0])
    }

    /// `gamma_1 = gamma~_1 = gamma~_2 = 0`, `gamma_2 = gamma_3 = gamma~_3`:
    /// the third tilde eigenvalue stays at one, so the ellipsoid keeps its
    /// z-extent and points with `v3 > 1` eventually leave the ball for good.
    pub fn example_ii(gamma: f64) -> Result<Self> {
        Self::new([0.0, gamma, gamma], [0.0, 0.0, gamma])
    }

    fn lambda_of(rates: &[f64; 3], t: f64) -> [f64; 3] {
        [
            (-2.0 * (rates[1] + rates[2]) * t).exp(),
            (-2.0 * (rates[0] + rates[2]) * t).exp(),
            (-2.0 * (rates[0] + rates[1]) * t).exp(),
        ]
    }

    fn lambda_limit_of(rates: &[f64; 3]) -> [f64; 3] {
        [
            if rates[1] + rates[2] == 0.0 { 1.0 } else { 0.0 },
            if rates[0] + rates[2] == 0.0 { 1.0 } else { 0.0 },
            if rates[0] + rates[1] == 0.0 { 1.0 } else { 0.0 },
        ]
    }

    /// Eigenvalues `lambda_j(t)` of the first map on the Pauli directions.
    pub fn lambda(&self, t: f64) -> [f64; 3] {
        Self::lambda_of(&self.gamma, t)
    }

    /// Eigenvalues `lambda~_j(t)` of the second map.
    pub fn lambda_tilde(&self, t: f64) -> [f64; 3] {
        Self::lambda_of(&self.gamma_tilde, t)
    }

    /// Analytic `t -> infinity` limits; each component is 0 or 1 according to
    /// whether the corresponding rate sum vanishes.
    pub fn asymptotic(&self) -> ([f64; 3], [f64; 3]) {
        (
            Self::lambda_limit_of(&self.gamma),
            Self::lambda_limit_of(&self.gamma_tilde),
        )
    }

    /// The corresponding four-channel family.
    pub fn family(&self) -> crate::dynamics::PauliChannelFamily {
        crate::dynamics::PauliChannelFamily::two_map(self.gamma, self.gamma_tilde)
            .expect("validated rates")
    }

    /// Mean of the strictly positive rates; 0 when all vanish.
    pub fn mean_nonzero_rate(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for g in self.gamma.iter().chain(self.gamma_tilde.iter()) {
            if *g > 0.0 {
                total += g;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }

    /// Default classification horizon `10 / mean rate`.
    pub fn default_horizon(&self) -> f64 {
        let rate = self.mean_nonzero_rate();
        if rate > 0.0 {
            10.0 / rate
        } else {
            10.0
        }
    }
}

/// A classification request: an initial point and the two-map rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PositivityQuery {
    pub v: [f64; 3],
    pub rates: TwoMapRates,
}

impl PositivityQuery {
    pub fn in_initial_domain(&self) -> bool {
        in_initial_domain(self.v)
    }

    pub fn violation(&self, t: f64) -> Result<f64> {
        evolved_violation(self.v, &self.rates, t)
    }

    pub fn classify(&self, horizon: f64, grid_points: usize) -> Result<PositivityVerdict> {
        classify(self.v, &self.rates, horizon, grid_points)
    }
}

/// `1/2 (1 + (v1-1) sigma_x + (v2-1) sigma_y + (v3-1) sigma_z)`; unit trace
/// for every `v`, positive exactly on the initial ball.
pub fn state_from_v(v: [f64; 3]) -> HsOperator {
    let [id, sx, sy, sz] = pauli_matrices();
    let mut acc = id;
    acc = &acc + &sx.scale_re(v[0] - 1.0);
    acc = &acc + &sy.scale_re(v[1] - 1.0);
    acc = &acc + &sz.scale_re(v[2] - 1.0);
    acc.scale_re(0.5)
}

/// The decomposition-side view of `v`: four terms on the canonical dual of
/// the qubit Pauli frame with weights `(1, v3, v2, v1)/sqrt(2)`, matching
/// the `(1,1), (2,2), (1,2), (2,1)` label order. The environmental side is a
/// trivial one-dimensional placeholder; only weights and system operators
/// matter for term-wise propagation.
pub fn opd_from_v(v: [f64; 3]) -> Result<Opd> {
    let frame = pauli_frame(2)?;
    let dual = frame.dual().expect("pauli frame ships a dual");
    let labels = canonical_labels(2);
    let s = 1.0 / 2.0_f64.sqrt();
    let weights = [s, v[2] * s, v[1] * s, v[0] * s];
    let terms = (0..4)
        .map(|i| OpdTerm {
            weight: weights[i],
            label: labels[i],
            system_op: dual[i].clone(),
            env_state: HsOperator::identity(1),
        })
        .collect();
    Ok(Opd { dim_s: 2, dim_e: 1, terms, frame, reduction: None })
}

/// Membership in the initial positivity ball
/// `(1-v1)^2 + (1-v2)^2 + (1-v3)^2 <= 1`.
pub fn in_initial_domain(v: [f64; 3]) -> bool {
    v.iter().map(|x| (1.0 - x) * (1.0 - x)).sum::<f64>() <= 1.0
}

/// The violation `g(t) = sum_j (lambda_j(t) - lambda~_j(t) v_j)^2`; the
/// evolved matrix is positive iff `g <= 1`.
pub fn evolved_violation(v: [f64; 3], rates: &TwoMapRates, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let lam = rates.lambda(t);
    let lam_t = rates.lambda_tilde(t);
    Ok((0..3).map(|j| (lam[j] - lam_t[j] * v[j]).powi(2)).sum())
}

fn violation_at(v: [f64; 3], rates: &TwoMapRates, t: f64) -> f64 {
    let lam = rates.lambda(t);
    let lam_t = rates.lambda_tilde(t);
    (0..3).map(|j| (lam[j] - lam_t[j] * v[j]).powi(2)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    AlwaysPositive,
    TransientlyNegative,
    EternallyNegative,
    Marginal,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            VerdictKind::AlwaysPositive => "AlwaysPositive",
            VerdictKind::TransientlyNegative => "TransientlyNegative",
            VerdictKind::EternallyNegative => "EternallyNegative",
            VerdictKind::Marginal => "Marginal",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub kind: VerdictKind,
    /// First time the trajectory leaves the allowed region `g <= 1`.
    pub first_exit_time: Option<f64>,
    /// First return into the allowed region after the first exit.
    pub reentry_time: Option<f64>,
    pub asymptotic_g: f64,
}

fn bisect_crossing(
    v: [f64; 3],
    rates: &TwoMapRates,
    mut lo: f64,
    mut hi: f64,
    upward: bool,
) -> f64 {
    // invariant: the crossing lies in (lo, hi)
    while hi - lo > TIME_TOL {
        let mid = 0.5 * (lo + hi);
        let above = violation_at(v, rates, mid) > 1.0;
        if above == upward {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Classifies an initial point by scanning `g` on `t = 0` plus a log-spaced
/// grid up to `horizon`, with the verdict anchored on the analytic
/// asymptotic value: eternal negativity is decided by the limit, never by
/// grid extrapolation, and exit/reentry times are refined by bisection.
pub fn classify(
    v: [f64; 3],
    rates: &TwoMapRates,
    horizon: f64,
    grid_points: usize,
) -> Result<PositivityVerdict> {
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidParameter("grid must have at least 2 points".into()));
    }

    let mut grid = Vec::with_capacity(grid_points + 1);
    grid.push(0.0);
    let lo = (horizon * 1e-4).ln();
    let hi = horizon.ln();
    for i in 0..grid_points {
        let f = i as f64 / (grid_points - 1) as f64;
        grid.push((lo + f * (hi - lo)).exp());
    }

    let (lam_inf, lam_t_inf) = rates.asymptotic();
    let asymptotic_g: f64 = (0..3)
        .map(|j| (lam_inf[j] - lam_t_inf[j] * v[j]).powi(2))
        .sum();

    let values: Vec<f64> = grid.iter().map(|&t| violation_at(v, rates, t)).collect();

    let mut first_exit_time: Option<f64> = None;
    let mut reentry_time: Option<f64> = None;
    if values[0] > 1.0 {
        first_exit_time = Some(0.0);
    }
    for w in 1..grid.len() {
        let above_prev = values[w - 1] > 1.0;
        let above_here = values[w] > 1.0;
        if above_here && !above_prev && first_exit_time.is_none() {
            first_exit_time = Some(bisect_crossing(v, rates, grid[w - 1], grid[w], true));
        }
        if !above_here && above_prev && first_exit_time.is_some() && reentry_time.is_none() {
            reentry_time = Some(bisect_crossing(v, rates, grid[w - 1], grid[w], false));
        }
    }

    let eternal = asymptotic_g > 1.0 + MARGINAL_TOL;
    if eternal && first_exit_time.is_none() {
        // The limit guarantees an exit beyond the horizon; bracket it by
        // doubling.
        let mut t_lo = *grid.last().unwrap();
        let mut t_hi = t_lo.max(TIME_TOL) * 2.0;
        let mut guard = 0;
        while violation_at(v, rates, t_hi) <= 1.0 && guard < 2000 {
            t_lo = t_hi;
            t_hi *= 2.0;
            guard += 1;
        }
        if violation_at(v, rates, t_hi) > 1.0 {
            first_exit_time = Some(bisect_crossing(v, rates, t_lo, t_hi, true));
        }
    }
    if !eternal
        && asymptotic_g < 1.0 - MARGINAL_TOL
        && first_exit_time.is_some()
        && reentry_time.is_none()
        && violation_at(v, rates, *grid.last().unwrap()) > 1.0
    {
        // still outside at the horizon but the limit forces a return
        let mut t_lo = *grid.last().unwrap();
        let mut t_hi = t_lo.max(TIME_TOL) * 2.0;
        let mut guard = 0;
        while violation_at(v, rates, t_hi) > 1.0 && guard < 2000 {
            t_lo = t_hi;
            t_hi *= 2.0;
            guard += 1;
        }
        if violation_at(v, rates, t_hi) <= 1.0 {
            reentry_time = Some(bisect_crossing(v, rates, t_lo, t_hi, false));
        }
    }

    let max_on_grid = values.iter().copied().fold(0.0, f64::max);
    let kind = if eternal {
        VerdictKind::EternallyNegative
    } else if (asymptotic_g - 1.0).abs() <= MARGINAL_TOL {
        VerdictKind::Marginal
    } else if first_exit_time.is_some() || max_on_grid > 1.0 {
        VerdictKind::TransientlyNegative
    } else {
        VerdictKind::AlwaysPositive
    };

    Ok(PositivityVerdict { kind, first_exit_time, reentry_time, asymptotic_g })
}

/// Result of checking whether the evolved-points ellipsoid sits inside the
/// evolved positivity ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Containment {
    pub contained: bool,
    /// Maximum squared distance from the ball center over the ellipsoid.
    pub max_distance_sq: f64,
    /// Evolved-space point attaining the maximum.
    pub witness: [f64; 3],
}

/// Maximizes `|| c + a o w ||^2` over the unit sphere `||w|| = 1` through the
/// secular equation `sum_j (a_j c_j)^2 / (mu - a_j^2)^2 = 1` with multiplier
/// `mu >= max_j a_j^2`, solved by bisection; the hard case (no forcing along
/// the top axis) distributes the leftover norm on that axis.
fn sphere_quadratic_max(a: [f64; 3], c: [f64; 3]) -> (f64, [f64; 3]) {
    let a2: Vec<f64> = a.iter().map(|x| x * x).collect();
    let g: Vec<f64> = (0..3).map(|j| a[j] * c[j]).collect();
    let a2max = a2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<bool> = a2.iter().map(|&x| x >= a2max * (1.0 - 1e-12)).collect();

    let g_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let top_forcing = (0..3)
        .filter(|&j| top[j])
        .map(|j| g[j] * g[j])
        .sum::<f64>()
        .sqrt();

    let psi = |mu: f64| -> f64 {
        (0..3)
            .map(|j| {
                let d = mu - a2[j];
                if g[j] == 0.0 {
                    0.0
                } else {
                    (g[j] / d).powi(2)
                }
            })
            .sum()
    };

    let solve_w = |mu: f64| -> [f64; 3] {
        let mut w = [0.0; 3];
        for j in 0..3 {
            let d = mu - a2[j];
            w[j] = if d.abs() > 0.0 { g[j] / d } else { 0.0 };
        }
        w
    };

    let w = if top_forcing > 1e-14 * g_norm.max(1.0) {
        // regular case: unique root in (a2max, a2max + ||g||]
        let mut lo = a2max * (1.0 + 1e-15) + 1e-300;
        let mut hi = a2max + g_norm;
        if psi(hi) > 1.0 {
            // numerical safety; expand until below the sphere constraint
            while psi(hi) > 1.0 {
                hi = a2max + 2.0 * (hi - a2max);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if psi(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        solve_w(0.5 * (lo + hi))
    } else {
        // hard case: no forcing on the top axis
        let s: f64 = (0..3)
            .filter(|&j| !top[j])
            .map(|j| {
                let d = a2max - a2[j];
                if g[j] == 0.0 { 0.0 } else { (g[j] / d).powi(2) }
            })
            .sum();
        if s <= 1.0 {
            let mut w = [0.0; 3];
            for j in 0..3 {
                if !top[j] {
                    let d = a2max - a2[j];
                    w[j] = if g[j] == 0.0 { 0.0 } else { g[j] / d };
                }
            }
            let leftover = (1.0 - s).max(0.0).sqrt();
            let top_idx = (0..3).find(|&j| top[j]).unwrap();
            w[top_idx] = leftover;
            w
        } else {
            let mut lo = a2max;
            let mut hi = a2max + g_norm;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if psi(mid) > 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            solve_w(0.5 * (lo + hi))
        }
    };

    // project onto the sphere against accumulated roundoff
    let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w = if n > 0.0 { [w[0] / n, w[1] / n, w[2] / n] } else { [1.0, 0.0, 0.0] };
    let value = (0..3).map(|j| (c[j] + a[j] * w[j]).powi(2)).sum();
    (value, w)
}

/// Secular-equation containment check of the evolved ellipsoid (center and
/// semi-axes `lambda~(t)`) inside the evolved positivity ball (unit radius at
/// `lambda(t)`).
pub fn ellipsoid_ball_containment(rates: &TwoMapRates, t: f64) -> Result<Containment> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let lam = rates.lambda(t);
    let lam_t = rates.lambda_tilde(t);
    let c = [lam[0] - lam_t[0], lam[1] - lam_t[1], lam[2] - lam_t[2]];
    let (max_distance_sq, w) = sphere_quadratic_max(lam_t, c);
    let witness = [
        lam_t[0] * (1.0 - w[0]),
        lam_t[1] * (1.0 - w[1]),
        lam_t[2] * (1.0 - w[2]),
    ];
    Ok(Containment {
        contained: max_distance_sq <= 1.0 + 1e-12,
        max_distance_sq,
        witness,
    })
}

/// Independent oracle for the containment maximization: brute force over a
/// Fibonacci lattice of `points` directions on the unit sphere.
pub fn sphere_oracle_max(rates: &TwoMapRates, t: f64, points: usize) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if points < 2 {
        return Err(Error::InvalidParameter("oracle needs at least 2 points".into()));
    }
    let lam = rates.lambda(t);
    let a = rates.lambda_tilde(t);
    let c = [lam[0] - a[0], lam[1] - a[1], lam[2] - a[2]];
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    let mut best: f64 = 0.0;
    for i in 0..points {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / points as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let theta = golden * i as f64;
        let w = [r * theta.cos(), r * theta.sin(), z];
        let value: f64 = (0..3).map(|j| (c[j] + a[j] * w[j]).powi(2)).sum();
        best = best.max(value);
    }
    Ok(best)
}

/// One sampled initial point with its flags at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct DomainSample {
    pub v: [f64; 3],
    pub g: f64,
    pub in_initial: bool,
    pub in_evolved: bool,
    pub verdict: VerdictKind,
}

/// Uniform grid over the bounding cube `[0,2]^3` of the initial ball, each
/// point carrying its violation, the two membership flags and its long-run
/// verdict; `resolution` is the number of points per axis.
pub fn sample_domain(
    rates: &TwoMapRates,
    t: f64,
    resolution: usize,
) -> Result<Vec<DomainSample>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let horizon = rates.default_horizon().max(2.0 * t);
    let coord = |i: usize| 2.0 * i as f64 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            for k in 0..resolution {
                let v = [coord(i), coord(j), coord(k)];
                let g = violation_at(v, rates, t);
                let verdict = classify(v, rates, horizon, 200)?;
                out.push(DomainSample {
                    v,
                    g,
                    in_initial: in_initial_domain(v),
                    in_evolved: g <= 1.0,
                    verdict: verdict.kind,
                });
            }
        }
    }
    Ok(out)
}
