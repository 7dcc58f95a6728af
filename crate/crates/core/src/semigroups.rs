//! One-parameter semigroups `(φ_t)` of self-maps: evaluation, the rate
//! `c(φ_1)`, classification and the law `c(φ_t) = t·c(φ_1)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{BoundaryPoint, Domain};
use crate::error::{Error, Result};
use crate::estimation::three_point_rate;
use crate::invariants::{divergence_rate, RateConfig};
use crate::linalg::{CMatrix, CVector, C64};
use crate::sampling;
use crate::self_maps::{denjoy_wolff, DenjoyWolffConfig, DenjoyWolffData, MapClass, SelfMap};

type FlowFn = Arc<dyn Fn(f64, &CVector) -> CVector + Send + Sync>;

/// Explicit affine flow on `H^q`:
/// `φ_t(z_1, u, v) = (e^{λt} z_1 + β (e^{λt} − 1)/λ, e^{(λ/2 + iω_j)t} u_j, e^{μ_k t} v_k)`,
/// with `z_1 + β t` in the first slot when `λ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSiegelFlow {
    /// `λ ≥ 0`.
    pub rate: f64,
    /// `β`, with `Im β ≥ 0`.
    #[serde(default)]
    pub drift: C64,
    /// `ω_j` for the `u` block.
    #[serde(default)]
    pub rotations: Vec<f64>,
    /// `μ_k` for the `v` block, `Re μ_k ≤ λ/2`.
    #[serde(default)]
    pub v_exponents: Vec<C64>,
}

impl AffineSiegelFlow {
    pub fn dim(&self) -> usize {
        1 + self.rotations.len() + self.v_exponents.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate >= 0.0) || !self.rate.is_finite() {
            return Err(Error::ConstraintViolated { name: "rate >= 0", margin: self.rate });
        }
        if self.drift.im < 0.0 {
            return Err(Error::ConstraintViolated { name: "Im drift >= 0", margin: self.drift.im });
        }
        for mu in &self.v_exponents {
            let margin = self.rate / 2.0 - mu.re;
            if margin < 0.0 {
                return Err(Error::ConstraintViolated { name: "Re mu <= rate/2", margin });
            }
        }
        Ok(())
    }

    /// `(M_t, s_t)` with `φ_t(z) = M_t z + s_t`.
    fn affine_parts(&self, t: f64) -> (CMatrix, CVector) {
        let q = self.dim();
        let lam = self.rate;
        let mut diag = Vec::with_capacity(q);
        diag.push(C64::new((lam * t).exp(), 0.0));
        for w in &self.rotations {
            diag.push(C64::new(lam * t / 2.0, w * t).exp());
        }
        for mu in &self.v_exponents {
            diag.push((mu * t).exp());
        }
        let mut shift = CVector::zeros(q);
        shift[0] = if lam == 0.0 { self.drift * t } else { self.drift * ((lam * t).exp_m1() / lam) };
        (CMatrix::from_diagonal(&CVector::from_vec(diag)), shift)
    }
}

#[derive(Clone)]
pub enum SemigroupKind {
    AffineSiegelFlow(AffineSiegelFlow),
    Closure(FlowFn),
}

impl fmt::Debug for SemigroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemigroupKind::AffineSiegelFlow(flow) => f.debug_tuple("AffineSiegelFlow").field(flow).finish(),
            SemigroupKind::Closure(_) => write!(f, "Closure(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Semigroup {
    domain: Domain,
    dim: usize,
    kind: SemigroupKind,
}

impl Semigroup {
    pub fn affine_siegel(flow: AffineSiegelFlow) -> Result<Self> {
        flow.validate()?;
        Ok(Semigroup { domain: Domain::Siegel, dim: flow.dim(), kind: SemigroupKind::AffineSiegelFlow(flow) })
    }

    /// `(t, z) ↦ φ_t(z)`; the semigroup law is checked on a seeded sample.
    pub fn from_closure<F>(domain: Domain, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, &CVector) -> CVector + Send + Sync + 'static,
    {
        let sg = Semigroup { domain, dim, kind: SemigroupKind::Closure(Arc::new(f)) };
        let report = sg.law_residual(32, 0)?;
        if report.identity_residual > 1e-12 || report.law_residual > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "closure is not a semigroup (identity {:e}, law {:e})",
                report.identity_residual, report.law_residual
            )));
        }
        Ok(sg)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SemigroupKind {
        &self.kind
    }

    pub fn evaluate(&self, t: f64, z: &CVector) -> Result<CVector> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("time {t} must be nonnegative")));
        }
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: z.len() });
        }
        Ok(self.eval(t, z))
    }

    fn eval(&self, t: f64, z: &CVector) -> CVector {
        match &self.kind {
            SemigroupKind::AffineSiegelFlow(flow) => {
                let (m, s) = flow.affine_parts(t);
                m * z + s
            }
            SemigroupKind::Closure(f) => f(t, z),
        }
    }

    /// `φ_t` as a self-map.
    pub fn at(&self, t: f64) -> Result<SelfMap> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("time {t} must be nonnegative")));
        }
        match &self.kind {
            SemigroupKind::AffineSiegelFlow(flow) => {
                let (m, s) = flow.affine_parts(t);
                SelfMap::affine(Domain::Siegel, m, s)
            }
            SemigroupKind::Closure(f) => {
                let f = f.clone();
                SelfMap::from_closure(self.domain, self.dim, true, move |z: &CVector| f(t, z))
            }
        }
    }

    /// `φ_t` as a ball map (Cayley-transported for Siegel flows).
    pub fn ball_map(&self, t: f64) -> Result<SelfMap> {
        let map = self.at(t)?;
        match self.domain {
            Domain::Ball => Ok(map),
            Domain::Siegel => SelfMap::cayley_transport(map),
        }
    }

    /// `sup |φ_0 z − z|` and `sup |φ_{t+s} z − φ_t φ_s z|` (relative to
    /// `max(1, |φ_{t+s} z|)`) over seeded `(t, s, z)` with `t, s ∈ [0, 2]`.
    pub fn law_residual(&self, samples: usize, seed: u64) -> Result<LawReport> {
        use rand::Rng;
        let mut rng = sampling::rng(seed);
        let mut identity_residual: f64 = 0.0;
        let mut law_residual: f64 = 0.0;
        for _ in 0..samples {
            let z = match self.domain {
                Domain::Ball => sampling::ball_point(&mut rng, self.dim, 0.95),
                Domain::Siegel => sampling::siegel_point(&mut rng, self.dim),
            };
            let t: f64 = rng.random_range(0.0..2.0);
            let s: f64 = rng.random_range(0.0..2.0);
            identity_residual = identity_residual.max((self.eval(0.0, &z) - &z).norm());
            let joint = self.eval(t + s, &z);
            let split = self.eval(t, &self.eval(s, &z));
            law_residual = law_residual.max((&joint - split).norm() / joint.norm().max(1.0));
        }
        Ok(LawReport { samples, identity_residual, law_residual })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub samples: usize,
    pub identity_residual: f64,
    pub law_residual: f64,
}

// ---------------------------------------------------------------------------
// Rate

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupRateConfig {
    pub t_max: f64,
    /// First time of the geometric grid `t_0·2^j`.
    pub t0: f64,
    pub tol: f64,
    /// The horizon doubles from `t_max` up to this bound until the bracket
    /// closes or the orbit leaves the representable range.
    pub t_limit: f64,
}

impl Default for SemigroupRateConfig {
    fn default() -> Self {
        SemigroupRateConfig { t_max: 64.0, t0: 1.0 / 16.0, tol: 1e-8, t_limit: 4096.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupRate {
    pub c: f64,
    pub bracket: (f64, f64),
    /// Geometric time grid.
    pub times: Vec<f64>,
    /// `k(x, φ_t x)/t` on the grid.
    pub ratios: Vec<f64>,
    pub fekete_inf: f64,
}

/// `lim_{t→∞} k(x, φ_t x)/t = c(φ_1)`.
pub fn semigroup_rate(phi: &Semigroup, x: &CVector, config: &SemigroupRateConfig) -> Result<SemigroupRate> {
    if x.len() != phi.dim {
        return Err(Error::DimensionMismatch { expected: phi.dim, found: x.len() });
    }
    if !phi.domain.contains(x) {
        return Err(Error::OutsideDomain("base point".into()));
    }
    if !(config.t0 > 0.0 && config.t_max >= 4.0 * config.t0) {
        return Err(Error::InvalidInput("need 0 < t0 <= t_max/4".into()));
    }
    let dist = |t: f64| -> Result<f64> { phi.domain.distance(x, &phi.eval(t, x)) };
    let at = |top: f64| -> Result<f64> {
        let ts = [top / 4.0, top / 2.0, top];
        Ok(three_point_rate(ts, [dist(ts[0])?, dist(ts[1])?, dist(ts[2])?]))
    };
    let mut times = Vec::new();
    let mut ratios = Vec::new();
    let mut t = config.t0;
    let mut push_until = |top: f64, times: &mut Vec<f64>, ratios: &mut Vec<f64>| -> Result<()> {
        while t <= top * (1.0 + 1e-12) {
            ratios.push(dist(t)? / t);
            times.push(t);
            t *= 2.0;
        }
        Ok(())
    };
    push_until(config.t_max, &mut times, &mut ratios)?;
    let mut tm = config.t_max;
    let mut half = at(tm / 2.0)?;
    let mut full = at(tm)?;
    loop {
        let converged = (full - half).abs() + config.tol <= 50.0 * config.tol;
        if converged || 2.0 * tm > config.t_limit * (1.0 + 1e-12) {
            break;
        }
        // An unrepresentable orbit ends the extension, not the estimate.
        let Ok(next) = at(2.0 * tm) else { break };
        if push_until(2.0 * tm, &mut times, &mut ratios).is_err() {
            break;
        }
        tm *= 2.0;
        (half, full) = (full, next);
    }
    let fekete_inf = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c = full.clamp(0.0, fekete_inf);
    let spread = (full - half).abs() + config.tol;
    let bracket = ((c - spread).max(0.0), (c + spread).min(fekete_inf).max(c));
    let report = SemigroupRate { c, bracket, times, ratios, fekete_inf };
    if bracket.1 - bracket.0 > 100.0 * config.tol {
        return Err(Error::NotConverged {
            what: "semigroup rate",
            detail: format!("bracket [{:e}, {:e}] at t = {tm}", bracket.0, bracket.1),
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub times: Vec<f64>,
    /// `c(φ_t)`, each from the discrete divergence rate of `φ_t`.
    pub rates: Vec<f64>,
    pub c1: f64,
    /// Least-squares slope of `rates` against `times` through the origin.
    pub slope: f64,
    /// `max_t |c(φ_t) − t·c(φ_1)|`.
    pub max_deviation: f64,
}

/// `c(φ_t) = t·c(φ_1)` on a grid of times.
pub fn rate_linearity_check(phi: &Semigroup, x: &CVector, t_grid: &[f64], config: &RateConfig) -> Result<LinearityReport> {
    let rate = |t: f64| -> Result<f64> { Ok(divergence_rate(&phi.at(t)?, x, config)?.c) };
    let c1 = rate(1.0)?;
    let rates = t_grid.iter().map(|&t| rate(t)).collect::<Result<Vec<_>>>()?;
    let tt: f64 = t_grid.iter().map(|t| t * t).sum();
    let slope = if tt > 0.0 { t_grid.iter().zip(&rates).map(|(t, c)| t * c).sum::<f64>() / tt } else { 0.0 };
    let max_deviation = t_grid.iter().zip(&rates).map(|(t, c)| (c - t * c1).abs()).fold(0.0, f64::max);
    Ok(LinearityReport { times: t_grid.to_vec(), rates, c1, slope, max_deviation })
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    pub class: MapClass,
    pub dilation: Option<f64>,
    pub point: Option<BoundaryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupClassification {
    pub class: MapClass,
    /// Denjoy–Wolff data of `φ_1` (ball coordinates).
    pub dw: DenjoyWolffData,
    /// `λ = −log λ_{φ_1}`.
    pub exponent: Option<f64>,
    pub slices: Vec<TimeSlice>,
    /// Every slice shares the class and Denjoy–Wolff point of `φ_1`, with
    /// dilation `e^{−λt}` within `1e−5`.
    pub consistent: bool,
}

pub const SLICE_TIMES: [f64; 3] = [0.5, 2.0, 4.0];

/// Class of `φ_1`, checked against `φ_t` for a few `t`.
pub fn classify_semigroup(phi: &Semigroup, config: &DenjoyWolffConfig) -> Result<SemigroupClassification> {
    let seed = CVector::zeros(phi.dim);
    let dw = denjoy_wolff(&phi.ball_map(1.0)?, &seed, config)?;
    let exponent = dw.dilation.map(|d| -d.ln());
    let mut slices = Vec::with_capacity(SLICE_TIMES.len());
    let mut consistent = true;
    for &t in &SLICE_TIMES {
        let data = denjoy_wolff(&phi.ball_map(t)?, &seed, config)?;
        consistent &= data.class == dw.class;
        if let (Some(lam), Some(d)) = (exponent, data.dilation) {
            consistent &= (d - (-lam * t).exp()).abs() <= 1e-5;
        }
        if let (Some(p), Some(p1)) = (&data.point, &dw.point) {
            consistent &= (p.coords() - p1.coords()).norm() <= 1e-3;
        }
        slices.push(TimeSlice { t, class: data.class, dilation: data.dilation, point: data.point });
    }
    Ok(SemigroupClassification { class: dw.class, dw, exponent, slices, consistent })
}
