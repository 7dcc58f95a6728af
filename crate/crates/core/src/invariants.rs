//! Dynamical invariants: hyperbolic steps, the divergence rate, the model
//! pseudo-distance, the rank of the limit pulled-back metric, the step
//! limit at the Denjoy–Wolff point and Lindelöf-type hypotheses.

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{
    ball_distance, classify_sequence, special_distance, BallPoint, BoundaryPoint,
    SequenceConfig, SequenceDiagnostics,
};
use crate::error::{Error, Result};
use crate::estimation::{log_corrected_rate, richardson_limit, tail_variation};
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, CMatrix, CVector, C64};
use crate::sampling;
use crate::self_maps::{DenjoyWolffData, SelfMap};

/// Relative slack for "nonincreasing" checks on distance sequences.
pub const MONOTONICITY_SLACK: f64 = 1e-10;

fn check_dim(f: &SelfMap, z: &CVector) -> Result<()> {
    if z.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: z.len() });
    }
    if !f.domain().contains(z) {
        return Err(Error::OutsideDomain(format!(
            "defining function {:e}",
            f.domain().defining_function(z)
        )));
    }
    Ok(())
}

fn check_nonincreasing(values: &[f64], slack: f64) -> Result<()> {
    for (index, w) in values.windows(2).enumerate() {
        let increase = w[1] - w[0];
        if increase > slack * w[0].abs().max(1.0) {
            return Err(Error::MonotonicityViolation { index: index + 1, increase });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hyperbolic step

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub window: usize,
    /// Tail flatness threshold.
    pub tol: f64,
    /// Largest `n` examined.
    pub cap: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { window: 20, tol: 1e-8, cap: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEstimate {
    pub m: usize,
    /// `values[n] = k(f^n x, f^{n+m} x)`.
    pub values: Vec<f64>,
    /// Richardson-extrapolated limit, clamped to `[0, last value]`.
    pub limit: f64,
    pub window: usize,
    pub tail_variation: f64,
    /// `(limit, last value)`: the sequence decreases to its limit.
    pub bracket: (f64, f64),
    pub truncated: Option<String>,
}

/// `s_m(x) = lim_n k(f^n x, f^{n+m} x)`.
pub fn hyperbolic_step(f: &SelfMap, x: &CVector, m: usize, config: &StepConfig) -> Result<StepEstimate> {
    if m == 0 {
        return Err(Error::InvalidInput("step gap must be at least 1".into()));
    }
    check_dim(f, x)?;
    let view = f.native_view();
    let domain = view.domain();
    let orbit = view.orbit(&view.pull(x), config.cap + m)?;
    let pts = &orbit.points;
    let available = pts.len().saturating_sub(m);
    if available == 0 {
        return Err(Error::Inconclusive("orbit shorter than the step gap".into()));
    }
    let window = config.window.max(2);
    let mut values = Vec::with_capacity(available);
    let mut flat = false;
    for n in 0..available {
        values.push(domain.distance(&pts[n], &pts[n + m])?);
        if n > 0 {
            let (prev, cur) = (values[n - 1], values[n]);
            if cur - prev > MONOTONICITY_SLACK * prev.abs().max(1.0) {
                return Err(Error::MonotonicityViolation { index: n, increase: cur - prev });
            }
        }
        if values.len() >= window && tail_variation(&values, window) < config.tol {
            flat = true;
            break;
        }
    }
    let last = *values.last().expect("nonempty");
    let limit = richardson_limit(&values).unwrap_or(last).clamp(0.0, last);
    let estimate = StepEstimate {
        m,
        tail_variation: tail_variation(&values, window),
        bracket: (limit, last),
        values,
        limit,
        window,
        truncated: orbit.truncated,
    };
    if !flat {
        return Err(Error::StepNotConverged(Box::new(estimate)));
    }
    Ok(estimate)
}

// ---------------------------------------------------------------------------
// Divergence rate

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConfig {
    pub max_m: usize,
    pub tol: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig { max_m: 10_000, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEstimate {
    /// `ratios[m−1] = k(x, f^m x)/m`.
    pub ratios: Vec<f64>,
    /// Running infimum of `ratios`.
    pub fekete_bounds: Vec<f64>,
    /// `k(f^n x, f^{n+m} x)/m` at `n = M/2`, an upper estimate of `s_m(x)/m`.
    pub via_steps: Vec<f64>,
    pub c: f64,
    pub bracket: (f64, f64),
    /// Number of orbit steps actually used.
    pub orbit_length: usize,
    pub truncated: Option<String>,
}

impl DivergenceEstimate {
    pub fn fekete_inf(&self) -> f64 {
        self.fekete_bounds.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// `c(f) = lim k(x, f^m x)/m`, with a certified Fekete upper bound.
pub fn divergence_rate(f: &SelfMap, x: &CVector, config: &RateConfig) -> Result<DivergenceEstimate> {
    check_dim(f, x)?;
    let view = f.native_view();
    let domain = view.domain();
    let orbit = view.orbit(&view.pull(x), config.max_m)?;
    let pts = &orbit.points;
    let m_len = pts.len() - 1;
    if m_len < 8 {
        return Err(Error::Inconclusive(format!("orbit representable for only {m_len} steps")));
    }
    let mut dist = Vec::with_capacity(m_len + 1);
    for p in pts {
        dist.push(domain.distance(&pts[0], p)?);
    }
    let ratios: Vec<f64> = (1..=m_len).map(|m| dist[m] / m as f64).collect();
    let mut fekete_bounds = Vec::with_capacity(m_len);
    let mut inf = f64::INFINITY;
    for r in &ratios {
        inf = inf.min(*r);
        fekete_bounds.push(inf);
    }
    let n0 = m_len / 2;
    let mut via_steps = Vec::with_capacity(m_len - n0);
    for m in 1..=(m_len - n0) {
        via_steps.push(domain.distance(&pts[n0], &pts[n0 + m])? / m as f64);
    }

    let full = log_corrected_rate(&dist).expect("orbit long enough");
    let half = log_corrected_rate(&dist[..=m_len / 2]).unwrap_or(full);
    let c = full.clamp(0.0, inf);
    let spread = (full - half).abs() + config.tol;
    let bracket = ((c - spread).max(0.0), (c + spread).min(inf).max(c));
    let estimate = DivergenceEstimate {
        ratios,
        fekete_bounds,
        via_steps,
        c,
        bracket,
        orbit_length: m_len,
        truncated: orbit.truncated,
    };
    if estimate.width() > 100.0 * config.tol {
        return Err(Error::RateNotConverged(Box::new(estimate)));
    }
    Ok(estimate)
}

// ---------------------------------------------------------------------------
// Model pseudo-distance

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelDistanceConfig {
    pub cap: usize,
    pub tol: f64,
    pub window: usize,
}

impl Default for ModelDistanceConfig {
    fn default() -> Self {
        ModelDistanceConfig { cap: 10_000, tol: 1e-12, window: 20 }
    }
}

/// `lim_m k(f^m z, f^m w)`, the pulled-back distance of the abstract model.
pub fn model_distance(f: &SelfMap, z: &CVector, w: &CVector, config: &ModelDistanceConfig) -> Result<f64> {
    if !f.is_univalent() {
        return Err(Error::NotUnivalent);
    }
    check_dim(f, z)?;
    check_dim(f, w)?;
    let view = f.native_view();
    let domain = view.domain();
    let (mut a, mut b) = (view.pull(z), view.pull(w));
    let start = domain.distance(&a, &b)?;
    if start == 0.0 {
        return Ok(0.0);
    }
    let (fa, fb) = (view.core.eval(&a), view.core.eval(&b));
    let gap = (&fa - &fb).norm();
    if gap <= 1e-15 * fa.norm().max(1.0) {
        return Err(Error::InjectivityCollision { gap });
    }
    let window = config.window.max(2);
    let mut values = vec![start];
    for _ in 0..config.cap {
        let (na, nb) = (view.core.eval(&a), view.core.eval(&b));
        if !domain.contains(&na) || !domain.contains(&nb) {
            return Err(Error::DomainEscape { step: values.len(), margin: domain.defining_function(&na) });
        }
        if crate::linalg::max_abs(&na).max(crate::linalg::max_abs(&nb)) > crate::self_maps::COORDINATE_LIMIT {
            break;
        }
        values.push(domain.distance(&na, &nb)?);
        a = na;
        b = nb;
        if values.len() >= window && tail_variation(&values, window) < config.tol {
            break;
        }
    }
    check_nonincreasing(&values, MONOTONICITY_SLACK)?;
    if values.len() < window || tail_variation(&values, window) >= config.tol {
        return Err(Error::NotConverged {
            what: "model distance",
            detail: format!("{} terms, last {:e}", values.len(), values.last().unwrap()),
        });
    }
    Ok(*values.last().unwrap())
}

// ---------------------------------------------------------------------------
// Canonical dimension

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionConfig {
    pub cap: usize,
    pub eig_tol: f64,
    pub window: usize,
}

impl Default for DimensionConfig {
    fn default() -> Self {
        DimensionConfig { cap: 100, eig_tol: 1e-6, window: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitMetricReport {
    /// Pullback forms `H_m`, `m = 0..=cap`, as rows of `[re, im]` pairs.
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    /// `eigenvalue_trajectories[i][m]`: i-th largest eigenvalue of `H_m`,
    /// divided by the largest eigenvalue of `H_0`.
    pub eigenvalue_trajectories: Vec<Vec<f64>>,
    pub rank: usize,
    pub tolerance: f64,
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// Rank of `lim (f^m)^* κ` at `base`.
pub fn canonical_dimension(f: &SelfMap, base: &CVector, config: &DimensionConfig) -> Result<LimitMetricReport> {
    if !f.is_univalent() {
        return Err(Error::NotUnivalent);
    }
    check_dim(f, base)?;
    let q = f.dim();
    let view = f.native_view();
    let domain = view.domain();
    let mut y = view.pull(base);
    let mut jac = view.pull_jacobian(base);
    let mut matrices = Vec::with_capacity(config.cap + 1);
    let mut trajectories = vec![Vec::with_capacity(config.cap + 1); q];
    let mut scale = None;
    for m in 0..=config.cap {
        let g = domain.metric_form(&y)?;
        let h = jac.adjoint() * g * &jac;
        let defect = hermitian_defect(&h);
        let size = h.norm().max(1e-300);
        if defect > 1e-10 * size.max(1.0) {
            return Err(Error::ConsistencyFailure(format!("pullback form not Hermitian ({defect:e})")));
        }
        let eig = hermitian_eigenvalues(&h);
        let s = *scale.get_or_insert_with(|| eig[0].max(1e-300));
        for (i, e) in eig.iter().enumerate() {
            trajectories[i].push((e / s).max(0.0));
        }
        matrices.push(matrix_rows(&h));
        if m == config.cap {
            break;
        }
        let next = view.core.eval(&y);
        if crate::linalg::max_abs(&next) > crate::self_maps::COORDINATE_LIMIT {
            break;
        }
        jac = view.core.jacobian(&y) * jac;
        y = next;
    }
    for t in &trajectories {
        check_nonincreasing_abs(t, 1e-8)?;
    }
    let window = config.window.max(2);
    for t in &trajectories {
        if t.len() >= window && tail_variation(t, window) > config.eig_tol / 10.0 {
            return Err(Error::NotConverged {
                what: "limit metric eigenvalues",
                detail: format!("tail variation {:e}", tail_variation(t, window)),
            });
        }
    }
    let rank = trajectories.iter().filter(|t| *t.last().unwrap() > config.eig_tol).count();
    Ok(LimitMetricReport { matrices, eigenvalue_trajectories: trajectories, rank, tolerance: config.eig_tol })
}

fn check_nonincreasing_abs(values: &[f64], slack: f64) -> Result<()> {
    for (index, w) in values.windows(2).enumerate() {
        if w[1] - w[0] > slack {
            return Err(Error::MonotonicityViolation { index: index + 1, increase: w[1] - w[0] });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Step limit at the Denjoy–Wolff point

/// `log((|c̄² + λ| + (1 − λ))/(|c̄² + λ| − (1 − λ)))`.
pub fn step_limit_formula(dilation: f64, c_phase: C64) -> Result<f64> {
    if !(dilation > 0.0 && dilation <= 1.0) {
        return Err(Error::InvalidInput(format!("dilation {dilation} outside (0, 1]")));
    }
    if (c_phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("phase must be unimodular".into()));
    }
    let s = (c_phase.conj() * c_phase.conj() + dilation).norm();
    let excess = 1.0 - dilation;
    if s - excess <= 0.0 {
        return Err(Error::InvalidInput("phase makes the formula singular".into()));
    }
    Ok(((s + excess) / (s - excess)).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLimitReport {
    pub formula: f64,
    /// `k(z_k, f(z_k))` along the sequence.
    pub values: Vec<f64>,
    pub empirical: f64,
    pub gap: f64,
    pub diagnostics: SequenceDiagnostics,
}

/// Compares `lim k(z_k, f(z_k))` along an admissible sequence with the
/// closed-form value.
pub fn step_limit_formula_check(
    f: &SelfMap,
    dw: &DenjoyWolffData,
    c_phase: C64,
    seq: &[BallPoint],
    config: &SequenceConfig,
) -> Result<StepLimitReport> {
    let a = dw
        .point
        .as_ref()
        .ok_or_else(|| Error::PreconditionFailed("step limit needs a Denjoy-Wolff point".into()))?;
    let dilation = dw
        .dilation
        .ok_or_else(|| Error::PreconditionFailed("step limit needs the dilation".into()))?;
    let diagnostics = classify_sequence(seq, a, config)?;
    if !diagnostics.is_admissible {
        return Err(Error::PreconditionFailed("sequence is not admissible".into()));
    }
    if let Some(p) = diagnostics.phases.last() {
        let observed = C64::new(p[0], p[1]);
        if (observed - c_phase).norm() > 1e-6 {
            return Err(Error::PreconditionFailed(format!(
                "sequence phase {observed} differs from the declared phase {c_phase}"
            )));
        }
    }
    let formula = if (dilation - 1.0).abs() <= 1e-12 { 0.0 } else { step_limit_formula(dilation, c_phase)? };
    let values = seq.iter().map(|z| f.displacement(z.coords())).collect::<Result<Vec<_>>>()?;
    let empirical = *values.last().expect("nonempty");
    Ok(StepLimitReport { formula, gap: (empirical - formula).abs(), values, empirical, diagnostics })
}

// ---------------------------------------------------------------------------
// Lindelöf hypotheses

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindelofConfig {
    /// Number of seeded Korányi sequences used as witnesses.
    pub witnesses: usize,
    pub witness_len: usize,
    /// Largest allowed distance between witness limits and the sequence limit.
    pub agreement_tol: f64,
    pub approach_tol: f64,
    pub seed: u64,
}

impl Default for LindelofConfig {
    fn default() -> Self {
        LindelofConfig { witnesses: 8, witness_len: 30, agreement_tol: 1e-3, approach_tol: 1e-3, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindelofReport {
    pub bound: f64,
    /// `k(z_n, z_{n+1})`.
    pub consecutive: Vec<f64>,
    /// `k(z_n, ⟨z_n,a⟩a)`.
    pub special: Vec<f64>,
    /// Value of `h` at the last sequence point, `[re, im]` per coordinate.
    pub limit: Vec<[f64; 2]>,
    /// Distance of each witness limit from `limit`.
    pub witness_deviations: Vec<f64>,
    pub limits_agree: bool,
}

/// Checks `k(z_n, z_{n+1}) ≤ C` and `k(z_n, ⟨z_n,a⟩a) ≤ C`, then compares
/// the limit of `h` along the sequence with its limits along Korányi
/// sequences.
pub fn lindelof_hypotheses<H>(
    h: H,
    seq: &[BallPoint],
    a: &BoundaryPoint,
    bound: f64,
    config: &LindelofConfig,
) -> Result<LindelofReport>
where
    H: Fn(&CVector) -> CVector,
{
    let last = seq.last().ok_or_else(|| Error::InvalidInput("empty sequence".into()))?;
    if last.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: last.dim() });
    }
    let distance = (last.coords() - a.coords()).norm();
    if distance > config.approach_tol {
        return Err(Error::NotConvergent { distance });
    }
    let slack = 1e-10 * bound.max(1.0);
    let mut consecutive = Vec::with_capacity(seq.len());
    for (index, w) in seq.windows(2).enumerate() {
        let value = ball_distance(w[0].coords(), w[1].coords(), 0.0)?;
        if value > bound + slack {
            return Err(Error::HypothesisFailed { bound: 1, index, value, limit: bound });
        }
        consecutive.push(value);
    }
    let mut special = Vec::with_capacity(seq.len());
    for (index, z) in seq.iter().enumerate() {
        let value = special_distance(z, a)?;
        if value > bound + slack {
            return Err(Error::HypothesisFailed { bound: 2, index, value, limit: bound });
        }
        special.push(value);
    }
    let limit = h(last.coords());
    let mut rng = sampling::rng(config.seed);
    let mut witness_deviations = Vec::with_capacity(config.witnesses);
    for _ in 0..config.witnesses {
        let witness = sampling::koranyi_sequence(&mut rng, a.coords(), config.witness_len);
        let end = witness.last().expect("nonempty witness");
        witness_deviations.push((h(end) - &limit).norm());
    }
    let limits_agree = witness_deviations.iter().all(|d| *d <= config.agreement_tol);
    Ok(LindelofReport {
        bound,
        consecutive,
        special,
        limit: limit.iter().map(|z| [z.re, z.im]).collect(),
        witness_deviations,
        limits_agree,
    })
}
