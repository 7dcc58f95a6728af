//! Holomorphic self-maps of `B^q` and `H^q`: representation, iteration,
//! fixed points, Denjoy–Wolff data and classification.
//!
//! A map conjugated by a chart (the Cayley transform, or a ball
//! automorphism) keeps its inner map. Orbits of such maps are computed in
//! the innermost ("native") chart, where they stay representable in `f64`;
//! distances are chart-invariant, and the boundary gap `1 − ‖z‖²` of the
//! outer point is pushed through the charts in closed form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{
    cayley_inverse_jacobian, cayley_inverse_raw, cayley_jacobian, cayley_raw,
    horosphere_quotient, BallAutomorphism, BoundaryPoint, Domain,
};
use crate::error::{Error, Result};
use crate::estimation::log_corrected_rate;
use crate::linalg::{is_finite, max_abs, CMatrix, CVector, C64};
use crate::sampling;

/// Coordinates beyond this magnitude end a native orbit.
pub const COORDINATE_LIMIT: f64 = 1e120;
/// Ball-native orbits stop once `1 − ‖z‖²` drops below this.
pub const BALL_GAP_FLOOR: f64 = 1e-12;
/// Defining-function undershoot that counts as leaving the domain.
pub const DOMAIN_ESCAPE_TOL: f64 = 1e-10;
/// Central-difference step for closure Jacobians.
pub const FD_STEP: f64 = 1e-6;

type Closure = Arc<dyn Fn(&CVector) -> CVector + Send + Sync>;

/// Biholomorphism from an inner domain onto the ball.
#[derive(Debug, Clone)]
pub enum Chart {
    /// `Ψ^{-1}: H^q → B^q`.
    CayleyInverse,
    /// A ball automorphism `B^q → B^q`.
    Automorphism(BallAutomorphism),
}

impl Chart {
    pub fn inner_domain(&self) -> Domain {
        match self {
            Chart::CayleyInverse => Domain::Siegel,
            Chart::Automorphism(_) => Domain::Ball,
        }
    }

    pub fn apply(&self, y: &CVector) -> CVector {
        match self {
            Chart::CayleyInverse => cayley_inverse_raw(y),
            Chart::Automorphism(a) => a.apply(y),
        }
    }

    pub fn apply_inverse(&self, z: &CVector) -> CVector {
        match self {
            Chart::CayleyInverse => cayley_raw(z),
            Chart::Automorphism(a) => a.apply_inverse(z),
        }
    }

    pub fn jacobian(&self, y: &CVector) -> CMatrix {
        match self {
            Chart::CayleyInverse => cayley_inverse_jacobian(y),
            Chart::Automorphism(a) => a.jacobian(y),
        }
    }

    pub fn jacobian_inverse(&self, z: &CVector) -> CMatrix {
        match self {
            Chart::CayleyInverse => cayley_jacobian(z),
            Chart::Automorphism(a) => a.jacobian_inverse(z),
        }
    }
}

#[derive(Clone)]
pub enum MapKind {
    Identity,
    BallAutomorphism(BallAutomorphism),
    /// `z ↦ M z` on the ball, `‖M‖ ≤ 1`.
    Linear(CMatrix),
    /// `z ↦ M z + t`; the linear-fractional normal forms on `H^q` are affine.
    Affine { linear: CMatrix, shift: CVector },
    /// Applied left to right.
    Composition(Vec<SelfMap>),
    /// `chart ∘ inner ∘ chart^{-1}`.
    Conjugated { chart: Chart, inner: Box<SelfMap> },
    Closure(Closure),
}

impl fmt::Debug for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Identity => write!(f, "Identity"),
            MapKind::BallAutomorphism(a) => f.debug_tuple("BallAutomorphism").field(a).finish(),
            MapKind::Linear(m) => f.debug_tuple("Linear").field(m).finish(),
            MapKind::Affine { linear, shift } => {
                f.debug_struct("Affine").field("linear", linear).field("shift", shift).finish()
            }
            MapKind::Composition(maps) => f.debug_tuple("Composition").field(maps).finish(),
            MapKind::Conjugated { chart, inner } => {
                f.debug_struct("Conjugated").field("chart", chart).field("inner", inner).finish()
            }
            MapKind::Closure(_) => write!(f, "Closure(..)"),
        }
    }
}

/// Holomorphic self-map of `B^q` or `H^q`.
#[derive(Debug, Clone)]
pub struct SelfMap {
    domain: Domain,
    dim: usize,
    kind: MapKind,
    univalent: bool,
}

impl SelfMap {
    pub fn identity(domain: Domain, dim: usize) -> Self {
        SelfMap { domain, dim, kind: MapKind::Identity, univalent: true }
    }

    pub fn ball_automorphism(aut: BallAutomorphism) -> Self {
        SelfMap { domain: Domain::Ball, dim: aut.dim(), kind: MapKind::BallAutomorphism(aut), univalent: true }
    }

    /// `z ↦ M z`; requires operator norm at most one.
    pub fn ball_linear(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidInput("linear map must be square".into()));
        }
        let norm = m.clone().svd(false, false).singular_values.max();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!("operator norm {norm} exceeds 1")));
        }
        let univalent = crate::linalg::smallest_singular_value(&m) > 1e-14;
        Ok(SelfMap { domain: Domain::Ball, dim: m.nrows(), kind: MapKind::Linear(m), univalent })
    }

    /// Affine map `z ↦ M z + t`, validated on a seeded sample of the domain.
    pub fn affine(domain: Domain, linear: CMatrix, shift: CVector) -> Result<Self> {
        let q = shift.len();
        if linear.nrows() != q || linear.ncols() != q || q == 0 {
            return Err(Error::DimensionMismatch { expected: q, found: linear.nrows() });
        }
        let univalent = crate::linalg::smallest_singular_value(&linear) > 1e-14;
        let map = SelfMap { domain, dim: q, kind: MapKind::Affine { linear, shift }, univalent };
        map.validate_on_samples(0)?;
        Ok(map)
    }

    /// Wraps an arbitrary evaluator; the Jacobian falls back to central
    /// differences. Validated on a seeded sample.
    pub fn from_closure<F>(domain: Domain, dim: usize, univalent: bool, f: F) -> Result<Self>
    where
        F: Fn(&CVector) -> CVector + Send + Sync + 'static,
    {
        let map = SelfMap { domain, dim, kind: MapKind::Closure(Arc::new(f)), univalent };
        map.validate_on_samples(0)?;
        Ok(map)
    }

    /// `maps[last] ∘ … ∘ maps[0]`.
    pub fn compose(maps: Vec<SelfMap>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::InvalidInput("empty composition".into()))?;
        let (domain, dim) = (first.domain, first.dim);
        for m in &maps {
            if m.domain != domain {
                return Err(Error::InvalidInput("composition domains differ".into()));
            }
            if m.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim });
            }
        }
        let univalent = maps.iter().all(|m| m.univalent);
        Ok(SelfMap { domain, dim, kind: MapKind::Composition(maps), univalent })
    }

    /// `Ψ^{-1} ∘ g ∘ Ψ`: a Siegel map seen on the ball.
    pub fn cayley_transport(g: SelfMap) -> Result<Self> {
        if g.domain != Domain::Siegel {
            return Err(Error::InvalidInput("Cayley transport expects a Siegel-domain map".into()));
        }
        Ok(SelfMap {
            domain: Domain::Ball,
            dim: g.dim,
            univalent: g.univalent,
            kind: MapKind::Conjugated { chart: Chart::CayleyInverse, inner: Box::new(g) },
        })
    }

    /// `φ ∘ f ∘ φ^{-1}` for a ball automorphism `φ`.
    pub fn conjugate_by(self, phi: BallAutomorphism) -> Result<Self> {
        if self.domain != Domain::Ball {
            return Err(Error::InvalidInput("automorphism conjugation expects a ball map".into()));
        }
        if phi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: phi.dim() });
        }
        Ok(SelfMap {
            domain: Domain::Ball,
            dim: self.dim,
            univalent: self.univalent,
            kind: MapKind::Conjugated { chart: Chart::Automorphism(phi), inner: Box::new(self) },
        })
    }

    /// `f^k`.
    pub fn power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(SelfMap::identity(self.domain, self.dim));
        }
        match &self.kind {
            MapKind::Conjugated { chart, inner } => Ok(SelfMap {
                domain: self.domain,
                dim: self.dim,
                univalent: self.univalent,
                kind: MapKind::Conjugated { chart: chart.clone(), inner: Box::new(inner.power(k)?) },
            }),
            MapKind::Affine { linear, shift } => {
                let mut m = linear.clone();
                let mut t = shift.clone();
                for _ in 1..k {
                    t = linear * &t + shift;
                    m = linear * &m;
                }
                Ok(SelfMap { kind: MapKind::Affine { linear: m, shift: t }, ..self.clone() })
            }
            _ => SelfMap::compose(vec![self.clone(); k]),
        }
    }

    /// Marks the map univalent (or not). The toolkit does not attempt to
    /// verify global injectivity.
    pub fn declare_univalent(mut self, univalent: bool) -> Self {
        self.univalent = univalent;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_univalent(&self) -> bool {
        self.univalent
    }

    /// Raw evaluation, no domain checks.
    pub fn eval(&self, z: &CVector) -> CVector {
        match &self.kind {
            MapKind::Identity => z.clone(),
            MapKind::BallAutomorphism(a) => a.apply(z),
            MapKind::Linear(m) => m * z,
            MapKind::Affine { linear, shift } => linear * z + shift,
            MapKind::Composition(maps) => {
                maps.iter().fold(z.clone(), |acc, m| m.eval(&acc))
            }
            MapKind::Conjugated { chart, inner } => {
                chart.apply(&inner.eval(&chart.apply_inverse(z)))
            }
            MapKind::Closure(f) => f(z),
        }
    }

    /// Evaluation with dimension and domain checks.
    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: z.len() });
        }
        if !self.domain.contains(z) {
            return Err(Error::OutsideDomain(format!(
                "defining function {:e}",
                self.domain.defining_function(z)
            )));
        }
        let image = self.eval(z);
        check_image(self.domain, &image, 1)?;
        Ok(image)
    }

    pub fn jacobian(&self, z: &CVector) -> CMatrix {
        match &self.kind {
            MapKind::Identity => CMatrix::identity(self.dim, self.dim),
            MapKind::BallAutomorphism(a) => a.jacobian(z),
            MapKind::Linear(m) => m.clone(),
            MapKind::Affine { linear, .. } => linear.clone(),
            MapKind::Composition(maps) => {
                let mut point = z.clone();
                let mut jac = CMatrix::identity(self.dim, self.dim);
                for m in maps {
                    jac = m.jacobian(&point) * jac;
                    point = m.eval(&point);
                }
                jac
            }
            MapKind::Conjugated { chart, inner } => {
                let y = chart.apply_inverse(z);
                let fy = inner.eval(&y);
                chart.jacobian(&fy) * inner.jacobian(&y) * chart.jacobian_inverse(z)
            }
            MapKind::Closure(f) => finite_difference_jacobian(f.as_ref(), z),
        }
    }

    /// `k(z, f(z))`, computed in the native chart.
    pub fn displacement(&self, z: &CVector) -> Result<f64> {
        let view = self.native_view();
        let y = view.pull(z);
        let fy = view.core.eval(&y);
        view.domain().distance(&y, &fy)
    }

    /// Checks that the map sends a seeded sample of its domain into itself.
    pub fn validate_on_samples(&self, seed: u64) -> Result<()> {
        let mut rng = sampling::rng(seed);
        for _ in 0..64 {
            let z = match self.domain {
                Domain::Ball => sampling::ball_point(&mut rng, self.dim, 0.95),
                Domain::Siegel => sampling::siegel_point(&mut rng, self.dim),
            };
            let image = self.eval(&z);
            let margin = self.domain.defining_function(&image);
            let scale = match self.domain {
                Domain::Ball => 1.0,
                Domain::Siegel => image[0].norm().max(1.0),
            };
            if !is_finite(&image) || margin < -1e-12 * scale {
                return Err(Error::InvalidInput(format!(
                    "map sends a sample point outside the domain (defining function {margin:e})"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn native_view(&self) -> NativeView<'_> {
        let mut charts = Vec::new();
        let mut core = self;
        while let MapKind::Conjugated { chart, inner } = &core.kind {
            charts.push(chart);
            core = inner;
        }
        NativeView { charts, core }
    }
}

fn finite_difference_jacobian(f: &(dyn Fn(&CVector) -> CVector + Send + Sync), z: &CVector) -> CMatrix {
    let q = z.len();
    let h = FD_STEP * z.norm().max(1.0);
    let mut jac = CMatrix::zeros(q, q);
    for col in 0..q {
        let mut dz = CVector::zeros(q);
        dz[col] = C64::new(h, 0.0);
        let diff = (f(&(z + &dz)) - f(&(z - &dz))) / C64::new(2.0 * h, 0.0);
        jac.set_column(col, &diff);
    }
    jac
}

fn check_image(domain: Domain, image: &CVector, step: usize) -> Result<()> {
    let margin = domain.defining_function(image);
    let scale = match domain {
        Domain::Ball => 1.0,
        Domain::Siegel => image[0].norm().max(1.0),
    };
    if !is_finite(image) || margin < -DOMAIN_ESCAPE_TOL * scale {
        return Err(Error::DomainEscape { step, margin });
    }
    Ok(())
}

/// A map seen through its charts: `f = charts[0] ∘ … ∘ core ∘ … ∘ charts[0]^{-1}`.
pub(crate) struct NativeView<'a> {
    charts: Vec<&'a Chart>,
    pub core: &'a SelfMap,
}

impl NativeView<'_> {
    pub fn domain(&self) -> Domain {
        self.core.domain
    }

    pub fn pull(&self, z: &CVector) -> CVector {
        self.charts.iter().fold(z.clone(), |acc, c| c.apply_inverse(&acc))
    }

    pub fn push(&self, y: &CVector) -> CVector {
        self.charts.iter().rev().fold(y.clone(), |acc, c| c.apply(&acc))
    }

    /// Derivative of `pull` at an outer point.
    pub fn pull_jacobian(&self, z: &CVector) -> CMatrix {
        let mut point = z.clone();
        let mut jac = CMatrix::identity(z.len(), z.len());
        for c in &self.charts {
            jac = c.jacobian_inverse(&point) * jac;
            point = c.apply_inverse(&point);
        }
        jac
    }

    /// `log(1 − ‖z‖²)` of the outer point corresponding to native `y`,
    /// together with that outer point.
    pub fn outer_gap(&self, y: &CVector) -> (f64, CVector) {
        let mut log_gap = self.core.domain.log_ball_gap(y);
        let mut ball = self.core.domain.to_ball(y);
        for c in self.charts.iter().rev() {
            if let Chart::Automorphism(a) = c {
                log_gap = a.push_log_gap(&ball, log_gap);
                ball = a.apply(&ball);
            }
        }
        (log_gap, ball)
    }

    /// Native orbit of `y0` with at most `steps` steps. Ends early (without
    /// error) when the orbit is no longer representable.
    pub fn orbit(&self, y0: &CVector, steps: usize) -> Result<NativeOrbit> {
        let mut points = Vec::with_capacity(steps.min(1 << 16) + 1);
        points.push(y0.clone());
        let mut truncated = None;
        let mut y = y0.clone();
        for step in 1..=steps {
            let next = self.core.eval(&y);
            check_image(self.core.domain, &next, step)?;
            if let Some(reason) = unrepresentable(self.core.domain, &next) {
                truncated = Some(reason);
                break;
            }
            points.push(next.clone());
            y = next;
        }
        Ok(NativeOrbit { domain: self.core.domain, points, truncated })
    }
}

fn unrepresentable(domain: Domain, y: &CVector) -> Option<String> {
    match domain {
        Domain::Siegel => {
            let big = max_abs(y);
            if big > COORDINATE_LIMIT {
                return Some(format!("coordinate magnitude {big:e} exceeds limit"));
            }
            (domain.defining_function(y) <= 0.0)
                .then(|| "orbit reached the boundary numerically".to_string())
        }
        Domain::Ball => {
            let gap = domain.defining_function(y);
            (gap < BALL_GAP_FLOOR).then(|| format!("ball gap {gap:e} below precision floor"))
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NativeOrbit {
    pub domain: Domain,
    pub points: Vec<CVector>,
    pub truncated: Option<String>,
}

// ---------------------------------------------------------------------------
// Iteration and fixed points

/// `f^m(z)`; `m = 0` returns `z`.
pub fn iterate(f: &SelfMap, z: &CVector, m: usize) -> Result<CVector> {
    if z.len() != f.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: z.len() });
    }
    if m == 0 {
        return Ok(z.clone());
    }
    let view = f.native_view();
    let mut y = view.pull(z);
    for step in 1..=m {
        y = view.core.eval(&y);
        check_image(view.domain(), &y, step)?;
    }
    let out = view.push(&y);
    if view.charts.is_empty() {
        return Ok(out);
    }
    check_image(f.domain, &out, m)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// An orbit whose outer `1 − ‖z‖²` falls below this has escaped.
    pub escape_gap: f64,
    /// Newton polishing is attempted every this many iterations.
    pub newton_every: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig { tol: 1e-10, max_iter: 100_000, escape_gap: 1e-8, newton_every: 16 }
    }
}

fn newton_polish(view: &NativeView<'_>, start: &CVector, tol: f64, escape_log_gap: f64) -> Option<CVector> {
    let q = start.len();
    let mut y = start.clone();
    for _ in 0..40 {
        let residual = view.core.eval(&y) - &y;
        let scale = y.norm().max(1.0);
        if residual.norm() < tol * scale {
            let (log_gap, _) = view.outer_gap(&y);
            let inside = view.domain().contains(&y) && log_gap > escape_log_gap + 2.0;
            return inside.then_some(y);
        }
        let system = view.core.jacobian(&y) - CMatrix::identity(q, q);
        let step = system.lu().solve(&(-residual))?;
        if !is_finite(&step) {
            return None;
        }
        y += step;
        if !is_finite(&y) {
            return None;
        }
    }
    None
}

/// Interior fixed point reached from one of the seeds, or `None` when every
/// orbit escapes to the boundary.
pub fn find_fixed_point(
    f: &SelfMap,
    seeds: &[CVector],
    config: &FixedPointConfig,
) -> Result<Option<CVector>> {
    if f.domain != Domain::Ball {
        return Err(Error::PreconditionFailed("fixed-point search expects a ball map".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidInput("no seeds".into()));
    }
    let view = f.native_view();
    let escape_log_gap = config.escape_gap.ln();
    let mut undecided = 0;
    'seeds: for seed in seeds {
        if seed.len() != f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, found: seed.len() });
        }
        let mut y = view.pull(seed);
        for iter in 0..config.max_iter {
            let next = view.core.eval(&y);
            if !is_finite(&next) || !view.domain().contains(&next) {
                continue 'seeds;
            }
            if (&next - &y).norm() < config.tol * y.norm().max(1.0) {
                let (log_gap, _) = view.outer_gap(&next);
                if log_gap > escape_log_gap {
                    return Ok(Some(view.push(&next)));
                }
            }
            if iter % config.newton_every.max(1) == 0 {
                if let Some(p) = newton_polish(&view, &y, config.tol, escape_log_gap) {
                    return Ok(Some(view.push(&p)));
                }
            }
            y = next;
            let (log_gap, _) = view.outer_gap(&y);
            if log_gap < escape_log_gap || unrepresentable(view.domain(), &y).is_some() {
                continue 'seeds;
            }
        }
        undecided += 1;
    }
    if undecided > 0 {
        return Err(Error::Inconclusive(format!(
            "{undecided} orbit(s) neither converged nor reached the boundary"
        )));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Denjoy–Wolff data

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

/// Orbit records behind a Denjoy–Wolff estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub orbit_length: usize,
    pub truncated: Option<String>,
    /// Outer `‖f^m(seed)‖` over the tail.
    pub norms: Vec<f64>,
    /// Normalized outer directions over the tail, `[re, im]` per coordinate.
    pub directions: Vec<Vec<[f64; 2]>>,
    /// Raw quotients `(1 − ‖z_{m+1}‖²)/(1 − ‖z_m‖²)` over the tail.
    pub dilation_quotients: Vec<f64>,
    /// Estimator (i): log-corrected fit of the boundary gaps.
    pub dilation_from_gaps: Option<f64>,
    /// Estimator (ii): `exp(−ĉ)` from the divergence rate.
    pub dilation_from_rate: Option<f64>,
    pub direction_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenjoyWolffData {
    /// Denjoy–Wolff point; unset for elliptic maps.
    pub point: Option<BoundaryPoint>,
    /// `λ_f ∈ (0, 1]`; unset for elliptic maps.
    pub dilation: Option<f64>,
    pub class: MapClass,
    #[serde(with = "crate::linalg::vector_serde::option")]
    pub fixed_point: Option<CVector>,
    pub orbit_trace: OrbitTrace,
}

impl DenjoyWolffData {
    /// Data for a non-elliptic map whose Denjoy–Wolff point and dilation are
    /// known in closed form.
    pub fn known(point: BoundaryPoint, dilation: f64, parabolic_tol: f64) -> Self {
        let class = if (dilation - 1.0).abs() <= parabolic_tol {
            MapClass::Parabolic
        } else {
            MapClass::Hyperbolic
        };
        DenjoyWolffData {
            point: Some(point),
            dilation: Some(dilation),
            class,
            fixed_point: None,
            orbit_trace: OrbitTrace::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenjoyWolffConfig {
    /// `|λ̂ − 1| ≤ tol` declares parabolic; the two estimators must agree
    /// within `10·tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Tail window for direction stability and diagnostics.
    pub window: usize,
    /// Maximal spread of the tail directions.
    pub direction_tol: f64,
    pub fixed_point: FixedPointConfig,
}

impl Default for DenjoyWolffConfig {
    fn default() -> Self {
        DenjoyWolffConfig {
            tol: 1e-6,
            max_iter: 100_000,
            window: 20,
            direction_tol: 1e-3,
            fixed_point: FixedPointConfig::default(),
        }
    }
}

fn to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Denjoy–Wolff point, dilation and class of `f` from the orbit of `seed`.
pub fn denjoy_wolff(f: &SelfMap, seed: &CVector, config: &DenjoyWolffConfig) -> Result<DenjoyWolffData> {
    if f.domain != Domain::Ball {
        return Err(Error::PreconditionFailed("Denjoy-Wolff estimation expects a ball map".into()));
    }
    if let Some(p) = find_fixed_point(f, std::slice::from_ref(seed), &config.fixed_point)? {
        return Ok(DenjoyWolffData {
            point: None,
            dilation: None,
            class: MapClass::Elliptic,
            fixed_point: Some(p),
            orbit_trace: OrbitTrace::default(),
        });
    }

    let view = f.native_view();
    let y0 = view.pull(seed);
    let orbit = view.orbit(&y0, config.max_iter)?;
    let m = orbit.points.len() - 1;
    if m < 8 {
        return Err(Error::Inconclusive(format!("orbit representable for only {m} steps")));
    }

    let mut log_gaps = Vec::with_capacity(m + 1);
    let mut distances = Vec::with_capacity(m + 1);
    let mut outer_tail = Vec::new();
    let tail_start = (m + 1).saturating_sub(config.window.max(2));
    for (k, y) in orbit.points.iter().enumerate() {
        let (log_gap, outer) = view.outer_gap(y);
        log_gaps.push(log_gap);
        distances.push(orbit.domain.distance(&y0, y)?);
        if k >= tail_start {
            outer_tail.push(outer);
        }
    }

    let last = outer_tail.last().expect("nonempty tail");
    let point = BoundaryPoint::normalized(last)?;
    let direction_spread = outer_tail
        .iter()
        .map(|z| (z / C64::new(z.norm(), 0.0) - point.coords()).norm())
        .fold(0.0, f64::max);
    if direction_spread > config.direction_tol {
        return Err(Error::NotConverged {
            what: "Denjoy-Wolff direction",
            detail: format!("tail spread {direction_spread:e}"),
        });
    }

    let gap_rate = log_corrected_rate(&log_gaps.iter().map(|g| -g).collect::<Vec<_>>())
        .ok_or_else(|| Error::Inconclusive("orbit too short for the gap fit".into()))?;
    let dist_rate = log_corrected_rate(&distances)
        .ok_or_else(|| Error::Inconclusive("orbit too short for the rate fit".into()))?;
    let from_gaps = (-gap_rate.max(0.0)).exp();
    let from_rate = (-dist_rate.max(0.0)).exp();

    let trace = OrbitTrace {
        orbit_length: m,
        truncated: orbit.truncated.clone(),
        norms: outer_tail.iter().map(|z| z.norm()).collect(),
        directions: outer_tail
            .iter()
            .map(|z| to_pairs(&(z / C64::new(z.norm(), 0.0))))
            .collect(),
        dilation_quotients: log_gaps[tail_start..]
            .windows(2)
            .map(|w| (w[1] - w[0]).exp())
            .collect(),
        dilation_from_gaps: Some(from_gaps),
        dilation_from_rate: Some(from_rate),
        direction_spread,
    };

    if (from_gaps - from_rate).abs() > 10.0 * config.tol {
        return Err(Error::Inconclusive(format!(
            "dilation estimators disagree: {from_gaps} (boundary gaps) vs {from_rate} (divergence rate)"
        )));
    }
    let class = if (from_rate - 1.0).abs() <= config.tol {
        MapClass::Parabolic
    } else {
        MapClass::Hyperbolic
    };
    Ok(DenjoyWolffData {
        point: Some(point),
        dilation: Some(from_rate),
        class,
        fixed_point: None,
        orbit_trace: trace,
    })
}

/// Elliptic, hyperbolic or parabolic, from the orbit of the origin.
pub fn classify(f: &SelfMap, config: &DenjoyWolffConfig) -> Result<MapClass> {
    Ok(denjoy_wolff(f, &CVector::zeros(f.dim), config)?.class)
}

// ---------------------------------------------------------------------------
// Julia's lemma

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuliaRadiusReport {
    pub radius: f64,
    pub accepted: usize,
    pub attempts: usize,
    /// Largest `quotient(f(z)) − λ_f·R` over the samples.
    pub worst_margin: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuliaReport {
    pub dilation: f64,
    pub margin_tol: f64,
    pub radii: Vec<JuliaRadiusReport>,
    pub worst_margin: f64,
    pub violations: usize,
}

pub const JULIA_MARGIN_TOL: f64 = 1e-8;

/// Samples `E(a, R)` by rejection and checks `f(z) ∈ E(a, λ_f R)`.
pub fn julia_check(
    f: &SelfMap,
    dw: &DenjoyWolffData,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<JuliaReport> {
    let a = dw
        .point
        .as_ref()
        .ok_or_else(|| Error::PreconditionFailed("Julia check needs a Denjoy-Wolff point".into()))?;
    let dilation = dw
        .dilation
        .ok_or_else(|| Error::PreconditionFailed("Julia check needs the dilation".into()))?;
    let mut rng = sampling::rng(seed);
    let mut reports = Vec::with_capacity(radii.len());
    for &radius in radii {
        let max_attempts = samples.saturating_mul(5000).max(10_000);
        let mut accepted = 0;
        let mut attempts = 0;
        let mut worst = f64::NEG_INFINITY;
        let mut violations = 0;
        while accepted < samples {
            if attempts >= max_attempts {
                return Err(Error::SamplingStarved { accepted, requested: samples });
            }
            attempts += 1;
            let z = sampling::ball_point(&mut rng, f.dim, 1.0);
            if 1.0 - z.norm_squared() < 1e-9 {
                continue;
            }
            if horosphere_quotient(a.coords(), &z) >= radius {
                continue;
            }
            accepted += 1;
            let image = f.eval(&z);
            let margin = horosphere_quotient(a.coords(), &image) - dilation * radius;
            worst = worst.max(margin);
            if margin > JULIA_MARGIN_TOL {
                violations += 1;
            }
        }
        reports.push(JuliaRadiusReport { radius, accepted, attempts, worst_margin: worst, violations });
    }
    Ok(JuliaReport {
        dilation,
        margin_tol: JULIA_MARGIN_TOL,
        worst_margin: reports.iter().map(|r| r.worst_margin).fold(f64::NEG_INFINITY, f64::max),
        violations: reports.iter().map(|r| r.violations).sum(),
        radii: reports,
    })
}
