//! Affine normal forms of univalent hyperbolic and parabolic
//! linear-fractional self-maps of `H^q`, their model domains and explicit
//! canonical semi-models `(r, τ)`.
//!
//! Coordinates are split as `z = (z_1, u, v)` (hyperbolic, `u ∈ C^{p−1}`,
//! `v ∈ C^{q−p}`) and `z = (z_1, u, v, w)` (parabolic, `u ∈ C^{r−1}`,
//! `v ∈ C^{p−r}`, `w ∈ C^{q−p}`). Empty blocks are zero-length.

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{Domain, SiegelPoint};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, smallest_singular_value, CMatrix, CVector, C64, I};
use crate::sampling;
use crate::self_maps::SelfMap;

/// Smallest eigenvalue a positive definite `Q` must exceed.
pub const PD_TOL: f64 = 1e-10;
/// Tolerance for deciding `Im b − |a|² = 0`.
pub const EQUALITY_TOL: f64 = 1e-10;
const ENTRY_TOL: f64 = 1e-12;

fn violated(name: &'static str, margin: f64) -> Error {
    Error::ConstraintViolated { name, margin }
}

fn square_block(rows: &[Vec<C64>], n: usize) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("block A must be {n}x{n}")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector_or_zeros(values: &[C64], n: usize, name: &str) -> Result<CVector> {
    if values.is_empty() {
        return Ok(CVector::zeros(n));
    }
    if values.len() != n {
        return Err(Error::InvalidInput(format!("{name} must have length {n}")));
    }
    Ok(CVector::from_column_slice(values))
}

fn hermitian_form(q_inv_source: &CMatrix, x: &CVector) -> Result<f64> {
    // ⟨Q^{-1} x, x⟩ for Hermitian positive definite Q.
    if x.is_empty() {
        return Ok(0.0);
    }
    let chol = q_inv_source
        .clone()
        .cholesky()
        .ok_or_else(|| violated("Q positive definite", 0.0))?;
    Ok(x.dotc(&chol.solve(x)).re)
}

/// What to do with the strict upper bound `Im b < λ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBoundPolicy {
    /// Reject forms violating the bound.
    #[default]
    Enforce,
    /// Accept them and record the violation in the validation.
    Flag,
}

// ---------------------------------------------------------------------------
// Hyperbolic form

/// `g(z_1, u, v) = (λ z_1 + b, D u, A v + c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicLftForm {
    pub lambda: f64,
    pub b: C64,
    #[serde(rename = "D", default)]
    pub d: Vec<C64>,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<C64>>,
    #[serde(default)]
    pub c: Vec<C64>,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicValidation {
    pub q_eigenvalues: Vec<f64>,
    /// `|c|² + ⟨Q^{-1}A^*c, A^*c⟩`.
    pub lower_bound: f64,
    pub im_b: f64,
    /// `λ − 1 − Im b`; nonpositive values break the strict upper bound.
    pub upper_margin: f64,
    pub upper_bound_flagged: bool,
}

/// A validated hyperbolic normal form.
#[derive(Debug, Clone)]
pub struct HyperbolicLft {
    form: HyperbolicLftForm,
    a: CMatrix,
    c: CVector,
    validation: HyperbolicValidation,
}

impl HyperbolicLftForm {
    pub fn q(&self) -> usize {
        self.p + self.a.len()
    }

    pub fn validate(&self, policy: UpperBoundPolicy) -> Result<HyperbolicLft> {
        let (p, n) = (self.p, self.a.len());
        if p == 0 {
            return Err(Error::InvalidInput("split index p must be at least 1".into()));
        }
        if self.d.len() != p - 1 {
            return Err(Error::InvalidInput(format!("D must have {} entries", p - 1)));
        }
        if !(self.lambda > 1.0) {
            return Err(violated("lambda > 1", self.lambda - 1.0));
        }
        if self.b.re.abs() > ENTRY_TOL {
            return Err(violated("b purely imaginary", self.b.re.abs()));
        }
        let root = self.lambda.sqrt();
        for d in &self.d {
            let dev = (d.norm() - root).abs();
            if dev > ENTRY_TOL * root {
                return Err(violated("|D_ii| = sqrt(lambda)", dev));
            }
        }
        let a = square_block(&self.a, n)?;
        let c = vector_or_zeros(&self.c, n, "c")?;
        if n > 0 && smallest_singular_value(&a) <= 1e-14 {
            return Err(violated("A invertible", smallest_singular_value(&a)));
        }
        let qm = CMatrix::identity(n, n) * C64::new(self.lambda, 0.0) - a.adjoint() * &a;
        let q_eigenvalues = if n > 0 { hermitian_eigenvalues(&qm) } else { Vec::new() };
        if let Some(&min) = q_eigenvalues.last() {
            if min <= PD_TOL {
                return Err(violated("Q = lambda I - A*A positive definite", min));
            }
        }
        let ac = a.adjoint() * &c;
        let lower_bound = c.norm_squared() + hermitian_form(&qm, &ac)?;
        let im_b = self.b.im;
        if lower_bound > im_b + ENTRY_TOL {
            return Err(violated("|c|^2 + <Q^-1 A*c, A*c> <= Im b", im_b - lower_bound));
        }
        let upper_margin = self.lambda - 1.0 - im_b;
        let upper_bound_flagged = upper_margin <= 0.0;
        if upper_bound_flagged && policy == UpperBoundPolicy::Enforce {
            return Err(violated("Im b < lambda - 1", upper_margin));
        }
        Ok(HyperbolicLft {
            form: self.clone(),
            a,
            c,
            validation: HyperbolicValidation { q_eigenvalues, lower_bound, im_b, upper_margin, upper_bound_flagged },
        })
    }
}

impl HyperbolicLft {
    pub fn form(&self) -> &HyperbolicLftForm {
        &self.form
    }

    pub fn validation(&self) -> &HyperbolicValidation {
        &self.validation
    }

    pub fn q(&self) -> usize {
        self.form.q()
    }

    pub fn p(&self) -> usize {
        self.form.p
    }

    fn linear(&self) -> CMatrix {
        let (p, q) = (self.form.p, self.q());
        let mut m = CMatrix::zeros(q, q);
        m[(0, 0)] = C64::new(self.form.lambda, 0.0);
        for (j, d) in self.form.d.iter().enumerate() {
            m[(1 + j, 1 + j)] = *d;
        }
        m.view_mut((p, p), (q - p, q - p)).copy_from(&self.a);
        m
    }

    fn shift(&self) -> CVector {
        let (p, q) = (self.form.p, self.q());
        let mut t = CVector::zeros(q);
        t[0] = self.form.b;
        t.rows_mut(p, q - p).copy_from(&self.c);
        t
    }

    pub fn apply(&self, z: &SiegelPoint) -> Result<SiegelPoint> {
        if z.dim() != self.q() {
            return Err(Error::DimensionMismatch { expected: self.q(), found: z.dim() });
        }
        let image = self.linear() * z.coords() + self.shift();
        SiegelPoint::from_coords(image.clone()).map_err(|_| Error::DomainEscape {
            step: 1,
            margin: Domain::Siegel.defining_function(&image),
        })
    }

    pub fn to_self_map(&self) -> Result<SelfMap> {
        SelfMap::affine(Domain::Siegel, self.linear(), self.shift())
    }

    /// `θ = Im b/(λ − 1)`, the depth of the model domain below `H^q`.
    pub fn theta(&self) -> f64 {
        self.form.b.im / (self.form.lambda - 1.0)
    }

    pub fn model_domain(&self) -> ModelDomain {
        ModelDomain::HyperbolicHalfspace { split: self.form.p, theta: self.theta() }
    }

    pub fn tau(&self) -> TauParams {
        TauParams::Hyperbolic { lambda: self.form.lambda, b: self.form.b, d: self.form.d.clone() }
    }
}

// ---------------------------------------------------------------------------
// Parabolic form

/// `g(z_1, u, v, w) = (z_1 + 2i⟨u,a⟩ + 2i⟨w,c⟩ + b, u + a, D v, A w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicLftForm {
    #[serde(default)]
    pub a: Vec<C64>,
    pub b: C64,
    #[serde(default)]
    pub c: Vec<C64>,
    #[serde(rename = "D", default)]
    pub d: Vec<C64>,
    #[serde(rename = "A", default)]
    pub a_block: Vec<Vec<C64>>,
    pub r: usize,
    pub p: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicCase {
    /// `Im b − |a|² > 0`: `Ω = C^q`.
    Trivial,
    /// `Im b − |a|² = 0`.
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicValidation {
    pub q_eigenvalues: Vec<f64>,
    /// `Im b − |a|²`.
    pub excess: f64,
    /// `⟨Q^{-1}c, c⟩` with `Q = I − AA^*`.
    pub printed_bound: f64,
    /// `⟨(I − A^*A)^{-1}c, c⟩`, what invariance of `H^q` needs.
    pub invariance_bound: f64,
    pub case: ParabolicCase,
    /// `|Im b − |a|²| ≤ 1e−10`, decided as equality.
    pub on_equality: bool,
}

#[derive(Debug, Clone)]
pub struct ParabolicLft {
    form: ParabolicLftForm,
    a_block: CMatrix,
    c: CVector,
    validation: ParabolicValidation,
}

impl ParabolicLftForm {
    pub fn q(&self) -> usize {
        self.p + self.a_block.len()
    }

    pub fn validate(&self) -> Result<ParabolicLft> {
        let (r, p, n) = (self.r, self.p, self.a_block.len());
        if r == 0 || r > p {
            return Err(Error::InvalidInput("split indices must satisfy 1 <= r <= p".into()));
        }
        if self.a.len() != r - 1 {
            return Err(Error::InvalidInput(format!("a must have {} entries", r - 1)));
        }
        if self.d.len() != p - r {
            return Err(Error::InvalidInput(format!("D must have {} entries", p - r)));
        }
        for d in &self.d {
            let dev = (d.norm() - 1.0).abs();
            if dev > ENTRY_TOL {
                return Err(violated("|D_ii| = 1", dev));
            }
        }
        let a_block = square_block(&self.a_block, n)?;
        let c = vector_or_zeros(&self.c, n, "c")?;
        if n > 0 && smallest_singular_value(&a_block) <= 1e-14 {
            return Err(violated("A invertible", smallest_singular_value(&a_block)));
        }
        let excess = self.b.im - self.a.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let on_equality = excess.abs() <= EQUALITY_TOL;
        if on_equality && c.norm() > ENTRY_TOL {
            return Err(Error::NonzeroCInCaseTwo { norm: c.norm() });
        }
        let id = CMatrix::identity(n, n);
        let qm = &id - &a_block * a_block.adjoint();
        let q_eigenvalues = if n > 0 { hermitian_eigenvalues(&qm) } else { Vec::new() };
        if let Some(&min) = q_eigenvalues.last() {
            if min <= PD_TOL {
                return Err(violated("Q = I - AA* positive definite", min));
            }
        }
        let printed_bound = hermitian_form(&qm, &c)?;
        if excess < printed_bound - ENTRY_TOL {
            return Err(violated("Im b - |a|^2 >= <Q^-1 c, c>", excess - printed_bound));
        }
        let q_star = &id - a_block.adjoint() * &a_block;
        let invariance_bound = hermitian_form(&q_star, &c)?;
        if excess < invariance_bound - ENTRY_TOL {
            return Err(violated("Im b - |a|^2 >= <(I - A*A)^-1 c, c>", excess - invariance_bound));
        }
        let case = if on_equality { ParabolicCase::Parabolic } else { ParabolicCase::Trivial };
        Ok(ParabolicLft {
            form: self.clone(),
            a_block,
            c,
            validation: ParabolicValidation {
                q_eigenvalues,
                excess,
                printed_bound,
                invariance_bound,
                case,
                on_equality,
            },
        })
    }
}

fn parabolic_linear(q: usize, r: usize, p: usize, a: &[C64], c: &CVector, d: &[C64], a_block: &CMatrix) -> CMatrix {
    let two_i = 2.0 * I;
    let mut m = CMatrix::identity(q, q);
    for (j, aj) in a.iter().enumerate() {
        m[(0, 1 + j)] = two_i * aj.conj();
    }
    for (j, dj) in d.iter().enumerate() {
        m[(r + j, r + j)] = *dj;
    }
    for (j, cj) in c.iter().enumerate() {
        m[(0, p + j)] = two_i * cj.conj();
    }
    m.view_mut((p, p), (q - p, q - p)).copy_from(a_block);
    m
}

fn parabolic_shift(q: usize, a: &[C64], b: C64) -> CVector {
    let mut t = CVector::zeros(q);
    t[0] = b;
    for (j, aj) in a.iter().enumerate() {
        t[1 + j] = *aj;
    }
    t
}

impl ParabolicLft {
    pub fn form(&self) -> &ParabolicLftForm {
        &self.form
    }

    pub fn validation(&self) -> &ParabolicValidation {
        &self.validation
    }

    pub fn q(&self) -> usize {
        self.form.q()
    }

    fn linear(&self) -> CMatrix {
        let f = &self.form;
        parabolic_linear(self.q(), f.r, f.p, &f.a, &self.c, &f.d, &self.a_block)
    }

    fn shift(&self) -> CVector {
        parabolic_shift(self.q(), &self.form.a, self.form.b)
    }

    pub fn apply(&self, z: &SiegelPoint) -> Result<SiegelPoint> {
        if z.dim() != self.q() {
            return Err(Error::DimensionMismatch { expected: self.q(), found: z.dim() });
        }
        let image = self.linear() * z.coords() + self.shift();
        SiegelPoint::from_coords(image.clone()).map_err(|_| Error::DomainEscape {
            step: 1,
            margin: Domain::Siegel.defining_function(&image),
        })
    }

    pub fn to_self_map(&self) -> Result<SelfMap> {
        SelfMap::affine(Domain::Siegel, self.linear(), self.shift())
    }

    pub fn model_domain(&self) -> ModelDomain {
        match self.validation.case {
            ParabolicCase::Trivial => ModelDomain::Whole,
            ParabolicCase::Parabolic => ModelDomain::SiegelSlab { split: self.form.p },
        }
    }
}

// ---------------------------------------------------------------------------
// Model domains

/// Closed-form description of `Ω = ⋃ g^{−n}(H^q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ModelDomain {
    /// `Im z_1 > Σ_{1≤j<split} |z_j|² − θ`.
    HyperbolicHalfspace { split: usize, theta: f64 },
    /// `Im z_1 > Σ_{1≤j<split} |z_j|²`.
    SiegelSlab { split: usize },
    /// All of `C^q`.
    Whole,
}

impl ModelDomain {
    /// Signed depth: positive exactly on `Ω`.
    pub fn depth(&self, z: &CVector) -> f64 {
        let partial = |split: usize| z.iter().take(split).skip(1).map(|x| x.norm_sqr()).sum::<f64>();
        match *self {
            ModelDomain::HyperbolicHalfspace { split, theta } => z[0].im - partial(split) + theta,
            ModelDomain::SiegelSlab { split } => z[0].im - partial(split),
            ModelDomain::Whole => f64::INFINITY,
        }
    }

    pub fn contains(&self, z: &CVector) -> bool {
        self.depth(z) > 0.0
    }

    pub fn describe(&self) -> String {
        let sum = |split: usize| match split {
            0 | 1 => "0".to_string(),
            2 => "|z_2|^2".to_string(),
            s => format!("|z_2|^2 + ... + |z_{s}|^2"),
        };
        match *self {
            ModelDomain::HyperbolicHalfspace { split, theta } => {
                format!("Im z_1 > {} - {}", sum(split), theta)
            }
            ModelDomain::SiegelSlab { split } => format!("Im z_1 > {}", sum(split)),
            ModelDomain::Whole => "C^q".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyConfig {
    pub members: usize,
    pub non_members: usize,
    /// Forward iterations allowed to reach `H^q`.
    pub horizon: usize,
    pub seed: u64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig { members: 1000, non_members: 1000, horizon: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub members_tested: usize,
    pub non_members_tested: usize,
    pub contradictions: usize,
    /// Largest number of iterations a member needed.
    pub max_entry_steps: usize,
}

/// First `n ≤ horizon` with `g^n(z) ∈ H^q`.
pub fn entry_time(g: &SelfMap, z: &CVector, horizon: usize) -> Option<usize> {
    let mut y = z.clone();
    for n in 0..=horizon {
        if Domain::Siegel.defining_function(&y) > 0.0 {
            return Some(n);
        }
        y = g.eval(&y);
    }
    None
}

/// Checks the closed-form `Ω` against forward iteration: sampled members
/// must enter `H^q` within the horizon, sampled non-members never.
pub fn model_domain_consistency(
    g: &SelfMap,
    omega: &ModelDomain,
    config: &ConsistencyConfig,
) -> Result<ConsistencyReport> {
    if g.domain() != Domain::Siegel {
        return Err(Error::PreconditionFailed("model domains live in Siegel coordinates".into()));
    }
    let q = g.dim();
    let mut rng = sampling::rng(config.seed);
    let mut report = ConsistencyReport {
        members_tested: 0,
        non_members_tested: 0,
        contradictions: 0,
        max_entry_steps: 0,
    };
    let non_members = if matches!(omega, ModelDomain::Whole) { 0 } else { config.non_members };
    for k in 0..(config.members + non_members) {
        let member = k < config.members;
        let z = sample_at_depth(&mut rng, omega, q, member);
        if omega.contains(&z) != member {
            continue;
        }
        match (member, entry_time(g, &z, config.horizon)) {
            (true, Some(n)) => report.max_entry_steps = report.max_entry_steps.max(n),
            (false, None) => {}
            _ => report.contradictions += 1,
        }
        if member {
            report.members_tested += 1;
        } else {
            report.non_members_tested += 1;
        }
    }
    if report.contradictions > 0 {
        return Err(Error::ConsistencyFailure(format!(
            "{} of {} samples contradict the closed-form model domain",
            report.contradictions,
            report.members_tested + report.non_members_tested
        )));
    }
    Ok(report)
}

fn sample_at_depth(rng: &mut sampling::SeededRng, omega: &ModelDomain, q: usize, member: bool) -> CVector {
    use rand::Rng;
    let mut z = CVector::zeros(q);
    for x in z.iter_mut().skip(1) {
        *x = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    z[0] = C64::new(rng.random_range(-3.0..3.0), 0.0);
    let magnitude = rng.random_range(-2.0f64..1.0) * std::f64::consts::LN_10;
    let target = if member { magnitude.exp() } else { -magnitude.exp() };
    let base = match omega {
        ModelDomain::Whole => {
            // Every point is a member; spread samples below and above H^q.
            z[0].im = rng.random_range(-3.0..3.0);
            return z;
        }
        _ => omega.depth(&z),
    };
    z[0].im = target - base;
    z
}

// ---------------------------------------------------------------------------
// Semi-models

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Identity,
    Trivial,
}

/// Data of the automorphism `τ` of `H^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum TauParams {
    /// `τ(z_1, u) = (λ z_1 + b, D u)`.
    Hyperbolic { lambda: f64, b: C64, d: Vec<C64> },
    /// `τ(z_1, u, v) = (z_1 + 2i⟨u,a⟩ + b, u + a, D v)`.
    Parabolic { a: Vec<C64>, b: C64, d: Vec<C64> },
    None,
}

impl TauParams {
    pub fn dim(&self) -> usize {
        match self {
            TauParams::Hyperbolic { d, .. } => 1 + d.len(),
            TauParams::Parabolic { a, d, .. } => 1 + a.len() + d.len(),
            TauParams::None => 0,
        }
    }

    /// `τ` as an affine self-map of `H^k`.
    pub fn to_self_map(&self) -> Result<Option<SelfMap>> {
        let k = self.dim();
        let (linear, shift) = match self {
            TauParams::Hyperbolic { lambda, b, d } => {
                let mut diag = vec![C64::new(*lambda, 0.0)];
                diag.extend_from_slice(d);
                let mut t = CVector::zeros(k);
                t[0] = *b;
                (CMatrix::from_diagonal(&CVector::from_vec(diag)), t)
            }
            TauParams::Parabolic { a, b, d } => {
                let r = 1 + a.len();
                let m = parabolic_linear(k, r, k, a, &CVector::zeros(0), d, &CMatrix::zeros(0, 0));
                (m, parabolic_shift(k, a, *b))
            }
            TauParams::None => return Ok(None),
        };
        SelfMap::affine(Domain::Siegel, linear, shift).map(Some)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retraction {
    /// `r` keeps the first `keep` coordinates.
    pub keep: usize,
    pub description: String,
}

impl Retraction {
    pub fn apply(&self, z: &CVector) -> CVector {
        z.rows(0, self.keep).into_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiModelReport {
    pub base_dimension: usize,
    pub tau_kind: TauKind,
    pub tau_params: TauParams,
    pub omega_description: String,
    pub omega: ModelDomain,
    pub retraction: Retraction,
    /// `sup ‖r(g(z)) − τ(r(z))‖` over the samples.
    pub intertwining_residual: Option<f64>,
    pub samples: usize,
}

fn intertwining_residual(g: &SelfMap, tau: &SelfMap, r: &Retraction, samples: usize, seed: u64) -> f64 {
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = sampling::siegel_point(&mut rng, g.dim());
        let lhs = r.apply(&g.eval(&z));
        let rhs = tau.eval(&r.apply(&z));
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// `r(z_1, u, v) = (z_1, u)`, `τ(z_1, u) = (λ z_1 + b, D u)`.
pub fn canonical_semi_model_hyperbolic(form: &HyperbolicLft, samples: usize, seed: u64) -> Result<SemiModelReport> {
    let g = form.to_self_map()?;
    let tau_params = form.tau();
    let tau = tau_params.to_self_map()?.expect("hyperbolic tau");
    let p = form.p();
    let retraction = Retraction { keep: p, description: format!("(z_1, ..., z_{p})") };
    let residual = intertwining_residual(&g, &tau, &retraction, samples, seed);
    let omega = form.model_domain();
    Ok(SemiModelReport {
        base_dimension: p,
        tau_kind: TauKind::Hyperbolic,
        tau_params,
        omega_description: omega.describe(),
        omega,
        retraction,
        intertwining_residual: Some(residual),
        samples,
    })
}

/// Case `Im b − |a|² > 0`: trivial semi-model. Case `= 0`:
/// `r(z_1, u, v, w) = (z_1, u, v)` and `τ(z_1, u, v) = (z_1 + 2i⟨u,a⟩ + b, u + a, D v)`.
pub fn parabolic_model_dichotomy(form: &ParabolicLft, samples: usize, seed: u64) -> Result<SemiModelReport> {
    let omega = form.model_domain();
    if form.validation.case == ParabolicCase::Trivial {
        return Ok(SemiModelReport {
            base_dimension: 0,
            tau_kind: TauKind::Trivial,
            tau_params: TauParams::None,
            omega_description: omega.describe(),
            omega,
            retraction: Retraction { keep: 0, description: "constant".into() },
            intertwining_residual: None,
            samples: 0,
        });
    }
    let f = &form.form;
    let g = form.to_self_map()?;
    let tau_params = TauParams::Parabolic { a: f.a.clone(), b: f.b, d: f.d.clone() };
    let tau = tau_params.to_self_map()?.expect("parabolic tau");
    let retraction = Retraction { keep: f.p, description: format!("(z_1, ..., z_{})", f.p) };
    let residual = intertwining_residual(&g, &tau, &retraction, samples, seed);
    let translation = f.a.iter().any(|x| x.norm() > ENTRY_TOL) || f.b.norm() > ENTRY_TOL;
    let tau_kind = if translation {
        TauKind::Parabolic
    } else if f.d.iter().all(|d| (d - C64::new(1.0, 0.0)).norm() <= ENTRY_TOL) {
        TauKind::Identity
    } else {
        TauKind::Elliptic
    };
    Ok(SemiModelReport {
        base_dimension: f.p,
        tau_kind,
        tau_params,
        omega_description: omega.describe(),
        omega,
        retraction,
        intertwining_residual: Some(residual),
        samples,
    })
}
