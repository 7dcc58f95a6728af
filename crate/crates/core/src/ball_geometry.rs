//! Complex hyperbolic geometry of the unit ball `B^q` and the Siegel
//! half-space `H^q`.
//!
//! Distances use the curvature −1 normalization, `k(0, z) = log((1+‖z‖)/(1−‖z‖))`,
//! and the matching infinitesimal metric
//! `κ(z; v) = 2·sqrt((1−‖z‖²)‖v‖² + |⟨v,z⟩|²)/(1−‖z‖²)`.
//! Inner products are `⟨u, v⟩ = Σ u_i·conj(v_i)`.
//!
//! Both models share one closed form. With `ρ(z, w) = 1 − ⟨z, w⟩` on the
//! ball and `ρ(z, w) = (z_1 − conj(w_1))/(2i) − ⟨z', w'⟩` on the Siegel
//! domain, `tanh²(k/2) = 1 − ρ(z,z)ρ(w,w)/|ρ(z,w)|²`. The numerator of
//! `tanh²` is expanded around `d = z − w` so that nearby points do not lose
//! digits to cancellation, and far points are handled in log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{basis, inner, CMatrix, CVector, C64, I};

/// Default distance from the sphere below which interior operations refuse
/// to run.
pub const DEFAULT_BOUNDARY_EPS: f64 = 1e-14;

/// Tolerance on `| ‖a‖ − 1 |` for boundary points.
pub const BOUNDARY_NORM_TOL: f64 = 1e-12;

/// Which realization of complex hyperbolic space a coordinate vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Ball,
    Siegel,
}

impl Domain {
    /// Defining function: `1 − ‖z‖²` on the ball, `Im z_1 − ‖z'‖²` on `H^q`.
    /// Positive exactly on the domain.
    pub fn defining_function(self, z: &CVector) -> f64 {
        match self {
            Domain::Ball => 1.0 - z.norm_squared(),
            Domain::Siegel => siegel_rho(z),
        }
    }

    pub fn contains(self, z: &CVector) -> bool {
        crate::linalg::is_finite(z) && self.defining_function(z) > 0.0
    }

    pub fn distance(self, z: &CVector, w: &CVector) -> Result<f64> {
        check_dims(z, w)?;
        match self {
            Domain::Ball => ball_distance(z, w, DEFAULT_BOUNDARY_EPS),
            Domain::Siegel => siegel_distance(z, w),
        }
    }

    /// Hermitian matrix `G` with `κ(z; v)² = v^* G v`.
    pub fn metric_form(self, z: &CVector) -> Result<CMatrix> {
        match self {
            Domain::Ball => ball_metric_form(z),
            Domain::Siegel => siegel_metric_form(z),
        }
    }

    pub fn metric(self, z: &CVector, v: &CVector) -> Result<f64> {
        check_dims(z, v)?;
        let g = self.metric_form(z)?;
        Ok(quadratic_form(&g, v).max(0.0).sqrt())
    }

    /// `log(1 − ‖Z‖²)` where `Z` is the point in ball coordinates (through
    /// the inverse Cayley transform for Siegel points).
    pub fn log_ball_gap(self, z: &CVector) -> f64 {
        match self {
            Domain::Ball => (1.0 - z.norm_squared()).ln(),
            Domain::Siegel => {
                4f64.ln() + siegel_rho(z).ln() - 2.0 * (z[0] + I).norm().ln()
            }
        }
    }

    /// The point expressed in ball coordinates.
    pub fn to_ball(self, z: &CVector) -> CVector {
        match self {
            Domain::Ball => z.clone(),
            Domain::Siegel => cayley_inverse_raw(z),
        }
    }

    /// A reference interior point: the origin, or `(i, 0, …, 0)`.
    pub fn base_point(self, q: usize) -> CVector {
        match self {
            Domain::Ball => CVector::zeros(q),
            Domain::Siegel => {
                let mut p = CVector::zeros(q);
                p[0] = I;
                p
            }
        }
    }
}

fn check_dims(z: &CVector, w: &CVector) -> Result<()> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), found: w.len() });
    }
    Ok(())
}

pub(crate) fn quadratic_form(g: &CMatrix, v: &CVector) -> f64 {
    inner(&(g * v), v).re
}

/// Point of the open unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint(#[serde(with = "crate::linalg::vector_serde")] CVector);

impl BallPoint {
    pub fn new(coords: CVector) -> Result<Self> {
        Self::with_margin(coords, DEFAULT_BOUNDARY_EPS)
    }

    pub fn with_margin(coords: CVector, eps: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("ball dimension must be at least 1".into()));
        }
        let norm = coords.norm();
        if !norm.is_finite() || norm >= 1.0 - eps {
            return Err(Error::BoundaryProximity { norm });
        }
        Ok(BallPoint(coords))
    }

    pub fn origin(q: usize) -> Self {
        BallPoint(CVector::zeros(q))
    }

    pub fn from_slice(coords: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(coords))
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn into_coords(self) -> CVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Point of the unit sphere `∂B^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint(#[serde(with = "crate::linalg::vector_serde")] CVector);

impl BoundaryPoint {
    pub fn new(coords: CVector) -> Result<Self> {
        let norm = coords.norm();
        if coords.is_empty() || (norm - 1.0).abs() > BOUNDARY_NORM_TOL {
            return Err(Error::InvalidInput(format!("boundary point has norm {norm}")));
        }
        Ok(BoundaryPoint(coords))
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn normalized(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(BoundaryPoint(v / C64::new(norm, 0.0)))
    }

    pub fn e1(q: usize) -> Self {
        BoundaryPoint(basis(q, 0))
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Point `(z_1, w)` of the Siegel half-space, `Im z_1 > ‖w‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint(#[serde(with = "crate::linalg::vector_serde")] CVector);

impl SiegelPoint {
    pub fn new(z1: C64, w: &[C64]) -> Result<Self> {
        let mut coords = CVector::zeros(w.len() + 1);
        coords[0] = z1;
        for (k, &x) in w.iter().enumerate() {
            coords[k + 1] = x;
        }
        Self::from_coords(coords)
    }

    pub fn from_coords(coords: CVector) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("Siegel dimension must be at least 1".into()));
        }
        let rho = siegel_rho(&coords);
        if !(rho > -1e-14) || !crate::linalg::is_finite(&coords) {
            return Err(Error::OutsideDomain(format!("Im z1 - |w|^2 = {rho:e}")));
        }
        Ok(SiegelPoint(coords))
    }

    pub fn z1(&self) -> C64 {
        self.0[0]
    }

    pub fn w(&self) -> CVector {
        self.0.rows(1, self.0.len() - 1).into_owned()
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn into_coords(self) -> CVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoranyiRegion {
    pub vertex: BoundaryPoint,
    pub amplitude: f64,
}

impl KoranyiRegion {
    pub fn new(vertex: BoundaryPoint, amplitude: f64) -> Result<Self> {
        if !(amplitude > 1.0) {
            return Err(Error::InvalidInput(format!("Korányi amplitude {amplitude} must exceed 1")));
        }
        Ok(KoranyiRegion { vertex, amplitude })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Horosphere {
    pub center: BoundaryPoint,
    pub radius: f64,
}

impl Horosphere {
    pub fn new(center: BoundaryPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("horosphere radius {radius} must be positive")));
        }
        Ok(Horosphere { center, radius })
    }
}

// ---------------------------------------------------------------------------
// Distances and metrics

/// Kobayashi distance on `B^q`.
pub fn kobayashi_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    check_dims(&z.0, &w.0)?;
    ball_distance(&z.0, &w.0, DEFAULT_BOUNDARY_EPS)
}

/// Kobayashi metric `κ(z; v)` on `B^q`.
pub fn kobayashi_metric(z: &BallPoint, v: &CVector) -> Result<f64> {
    Domain::Ball.metric(&z.0, v)
}

/// Kobayashi distance on `H^q`.
pub fn siegel_kobayashi_distance(z: &SiegelPoint, w: &SiegelPoint) -> Result<f64> {
    check_dims(&z.0, &w.0)?;
    siegel_distance(&z.0, &w.0)
}

fn distance_from_parts(t2: f64, log_s: f64) -> f64 {
    let t = t2.max(0.0).sqrt();
    if t < 0.5 {
        2.0 * t.atanh()
    } else {
        2.0 * (1.0 + t.min(1.0)).ln() - log_s
    }
}

pub(crate) fn ball_distance(z: &CVector, w: &CVector, eps: f64) -> Result<f64> {
    let nz = z.norm_squared();
    let nw = w.norm_squared();
    for n in [nz, nw] {
        if !n.is_finite() || n.sqrt() >= 1.0 - eps {
            return Err(Error::BoundaryProximity { norm: n.sqrt() });
        }
    }
    let d = z - w;
    let gw = 1.0 - nw;
    let den = (C64::new(1.0, 0.0) - inner(z, w)).norm_sqr();
    let num = d.norm_squared() * gw + inner(&d, w).norm_sqr();
    let log_s = (1.0 - nz).ln() + gw.ln() - den.ln();
    Ok(distance_from_parts(num / den, log_s))
}

pub(crate) fn siegel_rho(z: &CVector) -> f64 {
    let tail: f64 = z.iter().skip(1).map(|x| x.norm_sqr()).sum();
    z[0].im - tail
}

/// `ρ(z, w) = (z_1 − conj(w_1))/(2i) − ⟨z', w'⟩`.
fn siegel_rho_pair(z: &CVector, w: &CVector) -> C64 {
    let mut acc = (z[0] - w[0].conj()) / (2.0 * I);
    for k in 1..z.len() {
        acc -= z[k] * w[k].conj();
    }
    acc
}

pub(crate) fn siegel_distance(z: &CVector, w: &CVector) -> Result<f64> {
    let rz = siegel_rho(z);
    let rw = siegel_rho(w);
    if !(rz > 0.0 && rw > 0.0) || !crate::linalg::is_finite(z) || !crate::linalg::is_finite(w) {
        return Err(Error::OutsideDomain(format!(
            "Siegel defining function {rz:e}, {rw:e}"
        )));
    }
    let mut alpha = (z[0] - w[0]) / (2.0 * I);
    let mut dtail = 0.0;
    for k in 1..z.len() {
        let dk = z[k] - w[k];
        alpha -= dk * w[k].conj();
        dtail += dk.norm_sqr();
    }
    let r = siegel_rho_pair(z, w).norm();
    let t2 = (alpha.norm() / r).powi(2) + (rw / r) * (dtail / r);
    let log_s = rz.ln() + rw.ln() - 2.0 * r.ln();
    Ok(distance_from_parts(t2, log_s))
}

fn ball_metric_form(z: &CVector) -> Result<CMatrix> {
    let n2 = z.norm_squared();
    let g = 1.0 - n2;
    if !(g > 0.0) {
        return Err(Error::BoundaryProximity { norm: n2.sqrt() });
    }
    let q = z.len();
    let form = (CMatrix::identity(q, q) * C64::new(g, 0.0) + z * z.adjoint())
        * C64::new(4.0 / (g * g), 0.0);
    Ok(form)
}

fn siegel_metric_form(z: &CVector) -> Result<CMatrix> {
    let rho = siegel_rho(z);
    if !(rho > 0.0) {
        return Err(Error::OutsideDomain(format!("Siegel defining function {rho:e}")));
    }
    let q = z.len();
    // ∂ρ(v) = l^* v with l = (i/2, −w').
    let mut l = CVector::zeros(q);
    l[0] = I * 0.5;
    for k in 1..q {
        l[k] = -z[k];
    }
    let mut form = (&l * l.adjoint()) * C64::new(4.0 / (rho * rho), 0.0);
    for k in 1..q {
        form[(k, k)] += C64::new(4.0 / rho, 0.0);
    }
    Ok(form)
}

// ---------------------------------------------------------------------------
// Automorphisms

/// Ball automorphism `z ↦ U·φ_w(z)` with `φ_w` the involution exchanging
/// `w` and `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAutomorphism {
    w: CVector,
    unitary: CMatrix,
}

impl BallAutomorphism {
    pub fn new(w: &BallPoint, unitary: CMatrix) -> Result<Self> {
        let q = w.dim();
        if unitary.nrows() != q || unitary.ncols() != q {
            return Err(Error::DimensionMismatch { expected: q, found: unitary.nrows() });
        }
        let defect = (&unitary * unitary.adjoint() - CMatrix::identity(q, q))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > 1e-10 {
            return Err(Error::InvalidInput(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(BallAutomorphism { w: w.coords().clone(), unitary })
    }

    /// The involution `φ_w`.
    pub fn involution(w: &BallPoint) -> Self {
        let q = w.dim();
        BallAutomorphism { w: w.coords().clone(), unitary: CMatrix::identity(q, q) }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn center(&self) -> &CVector {
        &self.w
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    fn projection_parts(&self) -> (f64, f64) {
        let nw = self.w.norm_squared();
        (nw, (1.0 - nw).sqrt())
    }

    fn involution_raw(&self, z: &CVector) -> CVector {
        let (nw, s) = self.projection_parts();
        let zw = inner(z, &self.w);
        let pz = if nw > 0.0 { &self.w * (zw / nw) } else { CVector::zeros(z.len()) };
        let qz = z - &pz;
        let num = &self.w - &pz - qz * C64::new(s, 0.0);
        num / (C64::new(1.0, 0.0) - zw)
    }

    /// Evaluates on any vector of `C^q` where the denominator is nonzero,
    /// including boundary points.
    pub fn apply(&self, z: &CVector) -> CVector {
        &self.unitary * self.involution_raw(z)
    }

    pub fn apply_inverse(&self, z: &CVector) -> CVector {
        self.involution_raw(&(self.unitary.adjoint() * z))
    }

    pub fn inverse(&self) -> BallAutomorphismInverse<'_> {
        BallAutomorphismInverse(self)
    }

    pub fn jacobian(&self, z: &CVector) -> CMatrix {
        let q = z.len();
        let (nw, s) = self.projection_parts();
        let p = if nw > 0.0 {
            (&self.w * self.w.adjoint()) / C64::new(nw, 0.0)
        } else {
            CMatrix::zeros(q, q)
        };
        let l = &p + (CMatrix::identity(q, q) - &p) * C64::new(s, 0.0);
        let d = C64::new(1.0, 0.0) - inner(z, &self.w);
        let phi = self.involution_raw(z);
        let j = (-l + phi * self.w.adjoint()) / d;
        &self.unitary * j
    }

    pub fn jacobian_inverse(&self, z: &CVector) -> CMatrix {
        let uz = self.unitary.adjoint() * z;
        let inv = BallAutomorphism::involution(&BallPoint(self.w.clone()));
        inv.jacobian(&uz) * self.unitary.adjoint()
    }

    /// `log(1 − ‖A(y)‖²)` from `log(1 − ‖y‖²)`, without forming `A(y)`.
    pub(crate) fn push_log_gap(&self, y: &CVector, log_gap: f64) -> f64 {
        let (nw, _) = self.projection_parts();
        (1.0 - nw).ln() + log_gap - 2.0 * (C64::new(1.0, 0.0) - inner(y, &self.w)).norm().ln()
    }
}

/// Borrowed view evaluating the inverse automorphism.
pub struct BallAutomorphismInverse<'a>(&'a BallAutomorphism);

impl BallAutomorphismInverse<'_> {
    pub fn apply(&self, z: &CVector) -> CVector {
        self.0.apply_inverse(z)
    }
}

/// The involutive automorphism `φ_w` with `φ_w(w) = 0`.
pub fn automorphism_to_origin(w: &BallPoint) -> BallAutomorphism {
    BallAutomorphism::involution(w)
}

// ---------------------------------------------------------------------------
// Cayley transform

/// `Ψ(z) = i (e_1 + z)/(1 − z_1)`.
pub fn cayley(z: &BallPoint) -> Result<SiegelPoint> {
    let gap = (C64::new(1.0, 0.0) - z.coords()[0]).norm();
    if gap < 1e-14 {
        return Err(Error::BoundaryProximity { norm: z.norm() });
    }
    Ok(SiegelPoint(cayley_raw(z.coords())))
}

pub fn cayley_inverse(p: &SiegelPoint) -> Result<BallPoint> {
    BallPoint::with_margin(cayley_inverse_raw(p.coords()), 0.0)
}

pub(crate) fn cayley_raw(z: &CVector) -> CVector {
    let one = C64::new(1.0, 0.0);
    let den = one - z[0];
    let mut p = z.map(|x| I * x / den);
    p[0] = I * (one + z[0]) / den;
    p
}

pub(crate) fn cayley_inverse_raw(p: &CVector) -> CVector {
    let den = p[0] + I;
    let mut z = p.map(|x| 2.0 * x / den);
    z[0] = (p[0] - I) / den;
    z
}

/// Jacobian of `Ψ` at a ball point.
pub fn cayley_jacobian(z: &CVector) -> CMatrix {
    let q = z.len();
    let one = C64::new(1.0, 0.0);
    let den = one - z[0];
    let mut j = CMatrix::zeros(q, q);
    j[(0, 0)] = 2.0 * I / (den * den);
    for k in 1..q {
        j[(k, 0)] = I * z[k] / (den * den);
        j[(k, k)] = I / den;
    }
    j
}

/// Jacobian of `Ψ^{-1}` at a Siegel point.
pub fn cayley_inverse_jacobian(p: &CVector) -> CMatrix {
    let q = p.len();
    let den = p[0] + I;
    let mut j = CMatrix::zeros(q, q);
    j[(0, 0)] = 2.0 * I / (den * den);
    for k in 1..q {
        j[(k, 0)] = -2.0 * p[k] / (den * den);
        j[(k, k)] = 2.0 / den;
    }
    j
}

// ---------------------------------------------------------------------------
// Regions

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub quotient: f64,
    pub contains: bool,
}

/// `|1 − ⟨z,a⟩|²/(1 − ‖z‖²)` against the radius.
pub fn horosphere_contains(e: &Horosphere, z: &BallPoint) -> Membership {
    let quotient = horosphere_quotient(e.center.coords(), z.coords());
    Membership { quotient, contains: quotient < e.radius }
}

pub(crate) fn horosphere_quotient(a: &CVector, z: &CVector) -> f64 {
    (C64::new(1.0, 0.0) - inner(z, a)).norm_sqr() / (1.0 - z.norm_squared())
}

/// `|1 − ⟨z,a⟩| < R(1 − ‖z‖)`.
pub fn koranyi_contains(k: &KoranyiRegion, z: &BallPoint) -> Membership {
    let quotient = koranyi_quotient(k.vertex.coords(), z.coords());
    Membership { quotient, contains: quotient < k.amplitude }
}

pub(crate) fn koranyi_quotient(a: &CVector, z: &CVector) -> f64 {
    (C64::new(1.0, 0.0) - inner(z, a)).norm() / (1.0 - z.norm())
}

/// `k(z, ⟨z,a⟩a)`.
pub fn special_distance(z: &BallPoint, a: &BoundaryPoint) -> Result<f64> {
    let proj = a.coords() * inner(z.coords(), a.coords());
    ball_distance(z.coords(), &proj, 0.0)
}

// ---------------------------------------------------------------------------
// Sequence classification

/// Tail-window parameters for deciding limits of sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceConfig {
    /// Number of trailing terms used for every decision.
    pub window: usize,
    /// A tail whose largest value is below this counts as tending to zero.
    pub tol: f64,
    /// The last term must be this close to the boundary point.
    pub approach_tol: f64,
    /// A tail counts as bounded when the maximum of its second half is at
    /// most `1 + bound_slack` times the maximum of its first half.
    pub bound_slack: f64,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig { window: 20, tol: 1e-8, approach_tol: 1e-3, bound_slack: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDiagnostics {
    pub is_restricted: bool,
    pub special_distances: Vec<f64>,
    pub is_special: bool,
    pub is_admissible: bool,
    pub koranyi_amplitude_bound: Option<f64>,
    /// `|1 − ζ_k|/(1 − |ζ_k|)` with `ζ_k = ⟨z_k, a⟩`, over the tail.
    pub nontangential_ratios: Vec<f64>,
    /// `|1 − ⟨z_k,a⟩|/(1 − ‖z_k‖)` over the tail.
    pub koranyi_quotients: Vec<f64>,
    /// `(1 − ζ_k)/|1 − ζ_k|` over the tail.
    pub phases: Vec<[f64; 2]>,
    pub special_bounded: bool,
    /// Equivalence of eventual Korányi containment with
    /// "restricted and bounded special distances".
    pub bgp_consistent: bool,
}

pub(crate) fn tail_bounded(tail: &[f64], slack: f64) -> bool {
    if tail.iter().any(|x| !x.is_finite()) {
        return false;
    }
    if tail.len() < 2 {
        return true;
    }
    let half = tail.len() / 2;
    let first = tail[..half].iter().copied().fold(0.0, f64::max);
    let second = tail[half..].iter().copied().fold(0.0, f64::max);
    second <= (1.0 + slack) * first + 1e-300
}

pub fn classify_sequence(
    seq: &[BallPoint],
    a: &BoundaryPoint,
    config: &SequenceConfig,
) -> Result<SequenceDiagnostics> {
    let last = seq.last().ok_or_else(|| Error::InvalidInput("empty sequence".into()))?;
    if last.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: last.dim() });
    }
    let distance = (last.coords() - a.coords()).norm();
    if distance > config.approach_tol {
        return Err(Error::NotConvergent { distance });
    }
    let start = seq.len().saturating_sub(config.window.max(1));
    let tail = &seq[start..];
    let one = C64::new(1.0, 0.0);

    let mut special_distances = Vec::with_capacity(tail.len());
    let mut nontangential_ratios = Vec::with_capacity(tail.len());
    let mut koranyi_quotients = Vec::with_capacity(tail.len());
    let mut phases = Vec::with_capacity(tail.len());
    for z in tail {
        let zeta = inner(z.coords(), a.coords());
        let gap = one - zeta;
        special_distances.push(special_distance(z, a)?);
        nontangential_ratios.push(gap.norm() / (1.0 - zeta.norm()));
        koranyi_quotients.push(koranyi_quotient(a.coords(), z.coords()));
        let phase = gap / gap.norm();
        phases.push([phase.re, phase.im]);
    }

    let is_restricted = tail_bounded(&nontangential_ratios, config.bound_slack);
    let is_special = special_distances.iter().copied().fold(0.0, f64::max) <= config.tol;
    let special_bounded = tail_bounded(&special_distances, config.bound_slack);
    let koranyi_bounded = tail_bounded(&koranyi_quotients, config.bound_slack);
    let koranyi_amplitude_bound = koranyi_bounded
        .then(|| koranyi_quotients.iter().copied().fold(1.0, f64::max) * (1.0 + 1e-9));

    Ok(SequenceDiagnostics {
        is_restricted,
        is_admissible: is_special && is_restricted,
        is_special,
        special_distances,
        koranyi_amplitude_bound,
        nontangential_ratios,
        koranyi_quotients,
        phases,
        special_bounded,
        bgp_consistent: koranyi_bounded == (is_restricted && special_bounded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cvec, real_vec};

    fn bp(xs: &[f64]) -> BallPoint {
        BallPoint::new(real_vec(xs)).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(kobayashi_distance(&bp(&[0.0, 0.0]), &bp(&[0.0, 0.0])).unwrap(), 0.0);
        let d = kobayashi_distance(&bp(&[0.0, 0.0]), &bp(&[0.5, 0.0])).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-14);
        let d = kobayashi_distance(&bp(&[0.3, 0.0]), &bp(&[0.5, 0.0])).unwrap();
        assert!((d - (3f64.ln() - (13.0f64 / 7.0).ln())).abs() < 1e-14);
        assert!((d - 0.4795731).abs() < 1e-7);
    }

    #[test]
    fn distance_rejects_boundary() {
        let z = BallPoint::with_margin(real_vec(&[1.0 - 1e-16]), 0.0);
        assert!(z.is_err() || kobayashi_distance(&z.unwrap(), &bp(&[0.0])).is_err());
        assert!(matches!(
            BallPoint::new(real_vec(&[1.0])),
            Err(Error::BoundaryProximity { .. })
        ));
    }

    #[test]
    fn metric_examples() {
        let e1 = real_vec(&[1.0, 0.0]);
        assert!((kobayashi_metric(&bp(&[0.0, 0.0]), &e1).unwrap() - 2.0).abs() < 1e-15);
        let m = kobayashi_metric(&bp(&[0.5, 0.0]), &e1).unwrap();
        assert!((m - 8.0 / 3.0).abs() < 1e-14);
        let m = kobayashi_metric(&bp(&[0.0, 0.0]), &real_vec(&[3.0, 0.0])).unwrap();
        assert!((m - 6.0).abs() < 1e-14);
    }

    #[test]
    fn radial_integral_of_metric_matches_distance() {
        let r = 0.7;
        let n = 20_000;
        let h = r / n as f64;
        let e1 = real_vec(&[1.0, 0.0]);
        let mut acc = 0.0;
        for k in 0..=n {
            let x = k as f64 * h;
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * kobayashi_metric(&bp(&[x, 0.0]), &e1).unwrap();
        }
        acc *= h / 3.0;
        let d = kobayashi_distance(&bp(&[0.0, 0.0]), &bp(&[r, 0.0])).unwrap();
        assert!((acc - d).abs() < 1e-9);
    }

    #[test]
    fn automorphism_examples() {
        let zero = BallPoint::origin(2);
        let id_like = automorphism_to_origin(&zero);
        assert!(id_like.apply(zero.coords()).norm() < 1e-15);

        let w = bp(&[0.5, 0.0]);
        let phi = automorphism_to_origin(&w);
        assert!(phi.apply(w.coords()).norm() < 1e-14);
        assert!((phi.apply(zero.coords()) - w.coords()).norm() < 1e-14);
        let z = BallPoint::new(cvec(&[c(0.1, 0.2), c(-0.3, 0.05)])).unwrap();
        assert!((phi.apply(&phi.apply(z.coords())) - z.coords()).norm() < 1e-14);
    }

    #[test]
    fn automorphism_jacobian_matches_finite_differences() {
        let w = BallPoint::new(cvec(&[c(0.3, -0.1), c(0.2, 0.4)])).unwrap();
        let phi = automorphism_to_origin(&w);
        let z = cvec(&[c(-0.2, 0.1), c(0.05, 0.3)]);
        let j = phi.jacobian(&z);
        let h = 1e-6;
        for col in 0..2 {
            let mut dz = CVector::zeros(2);
            dz[col] = c(h, 0.0);
            let fd = (phi.apply(&(&z + &dz)) - phi.apply(&(&z - &dz))) / c(2.0 * h, 0.0);
            for row in 0..2 {
                assert!((fd[row] - j[(row, col)]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn cayley_examples() {
        let p = cayley(&bp(&[0.0, 0.0])).unwrap();
        assert!((p.z1() - I).norm() < 1e-15);
        assert!(p.w().norm() < 1e-15);
        let p = cayley(&bp(&[0.5, 0.0])).unwrap();
        assert!((p.z1() - 3.0 * I).norm() < 1e-14);
        let back = cayley_inverse(&p).unwrap();
        assert!((back.coords() - real_vec(&[0.5, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn siegel_gap_formula_matches_ball_norm() {
        let z = cvec(&[c(0.3, 0.2), c(-0.1, 0.4)]);
        let p = cayley_raw(&z);
        let direct = (1.0 - z.norm_squared()).ln();
        assert!((Domain::Siegel.log_ball_gap(&p) - direct).abs() < 1e-13);
    }

    #[test]
    fn horosphere_examples() {
        let e = Horosphere::new(BoundaryPoint::e1(2), 1.0).unwrap();
        let m = horosphere_contains(&e, &bp(&[0.0, 0.0]));
        assert_eq!(m.quotient, 1.0);
        assert!(!m.contains);
        let m = horosphere_contains(&e, &bp(&[0.5, 0.0]));
        assert!((m.quotient - 1.0 / 3.0).abs() < 1e-15);
        assert!(m.contains);
    }

    #[test]
    fn koranyi_examples() {
        let z = bp(&[0.5, 0.0]);
        let k = |r| KoranyiRegion::new(BoundaryPoint::e1(2), r).unwrap();
        assert!(koranyi_contains(&k(1.0 + 1e-9), &z).contains);
        assert!(KoranyiRegion::new(BoundaryPoint::e1(2), 1.0).is_err());
        for t in [0.1, 0.5, 0.9, 0.999] {
            assert!(koranyi_contains(&k(1.0001), &bp(&[t, 0.0])).contains);
        }
        let far = bp(&[0.0, 0.999_999]);
        assert!(!koranyi_contains(&k(10.0), &far).contains);
    }

    fn seq(f: impl Fn(i32) -> CVector, n: i32) -> Vec<BallPoint> {
        (1..=n).map(|k| BallPoint::new(f(k)).unwrap()).collect()
    }

    #[test]
    fn radial_sequence_is_admissible() {
        let s = seq(|k| real_vec(&[1.0 - 2f64.powi(-k), 0.0]), 40);
        let d = classify_sequence(&s, &BoundaryPoint::e1(2), &SequenceConfig::default()).unwrap();
        assert!(d.is_restricted && d.is_special && d.is_admissible);
        assert!(d.koranyi_amplitude_bound.unwrap() < 1.0 + 1e-6);
        assert!(d.bgp_consistent);
    }

    #[test]
    fn transverse_sequence_is_restricted_not_special() {
        let s = seq(
            |k| {
                let t = 2f64.powi(-k);
                cvec(&[c(1.0 - t, 0.0), c(0.0, 0.9 * t.sqrt())])
            },
            40,
        );
        let d = classify_sequence(&s, &BoundaryPoint::e1(2), &SequenceConfig::default()).unwrap();
        assert!(d.is_restricted);
        assert!(!d.is_special);
        assert!(d.special_bounded);
        assert!(d.special_distances.iter().all(|&x| x > 1.0));
        assert!(d.bgp_consistent);
    }

    #[test]
    fn tangential_sequence_is_not_restricted() {
        let s = seq(
            |k| {
                let t = 2f64.powi(-k);
                cvec(&[c(1.0 - t, t.sqrt()), c(0.0, 0.0)])
            },
            40,
        );
        let d = classify_sequence(&s, &BoundaryPoint::e1(2), &SequenceConfig::default()).unwrap();
        assert!(!d.is_restricted);
        assert!(d.koranyi_amplitude_bound.is_none());
        assert!(d.bgp_consistent);
    }

    #[test]
    fn non_convergent_sequence_rejected() {
        let s = seq(|_| real_vec(&[0.5, 0.0]), 10);
        assert!(matches!(
            classify_sequence(&s, &BoundaryPoint::e1(2), &SequenceConfig::default()),
            Err(Error::NotConvergent { .. })
        ));
    }
}
