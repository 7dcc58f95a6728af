//! One function per subcommand. Each returns an [`Outcome`]; errors are
//! mapped to exit codes by the caller.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::spec::{point_pairs, MapSpec, NormalForm};
use super::Outcome;
use crate::ball_geometry::Domain;
use crate::error::{Error, Result};
use crate::functional_equations::{abel_solve, semigroup_valiron, valiron_solve, ValironConfig, ValironSolution};
use crate::invariants::{
    canonical_dimension, divergence_rate, hyperbolic_step, DimensionConfig, RateConfig, StepConfig,
};
use crate::lft_models::{
    canonical_semi_model_hyperbolic, model_domain_consistency, parabolic_model_dichotomy, ConsistencyConfig,
};
use crate::linalg::CVector;
use crate::sampling;
use crate::self_maps::{denjoy_wolff, DenjoyWolffConfig, MapClass, SelfMap, COORDINATE_LIMIT};
use crate::semigroups::{classify_semigroup, rate_linearity_check, semigroup_rate, Semigroup, SemigroupRateConfig};

/// Time grid shared by the semigroup checks.
pub const SEMIGROUP_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Largest orbit length used for the limit metric.
const DIMENSION_CAP: usize = 100;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn dw_config(cfg: &RunConfig) -> DenjoyWolffConfig {
    DenjoyWolffConfig { tol: cfg.tol.max(1e-6), max_iter: cfg.max_iter, ..DenjoyWolffConfig::default() }
}

fn check_point(f: &SelfMap, z: &CVector) -> Result<()> {
    if z.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: z.len() });
    }
    if !f.domain().contains(z) {
        return Err(Error::OutsideDomain(format!("point is not in the {:?} domain", f.domain())));
    }
    Ok(())
}

fn base_or(f: &SelfMap, point: Option<CVector>) -> Result<CVector> {
    let z = point.unwrap_or_else(|| f.domain().base_point(f.dim()));
    check_point(f, &z)?;
    Ok(z)
}

/// `(class, λ_f)` implied by the spec itself, when it is a normal form or
/// an affine flow.
fn expected_class(spec: &MapSpec) -> Result<Option<(MapClass, f64)>> {
    if let Some(nf) = spec.normal_form()? {
        return Ok(Some(match nf {
            NormalForm::Hyperbolic(h) => (MapClass::Hyperbolic, 1.0 / h.form().lambda),
            NormalForm::Parabolic(_) => (MapClass::Parabolic, 1.0),
        }));
    }
    if let MapSpec::SemigroupAffineSiegel { flow, t, .. } = spec {
        let dilation = (-flow.rate * t).exp();
        let class = if dilation < 1.0 { MapClass::Hyperbolic } else { MapClass::Parabolic };
        return Ok(Some((class, dilation)));
    }
    Ok(None)
}

pub fn classify(spec: &MapSpec, point: Option<CVector>, cfg: &RunConfig) -> Result<Outcome> {
    let f = spec.ball_map()?;
    let seed = base_or(&f, point)?;
    let dw = denjoy_wolff(&f, &seed, &dw_config(cfg))?;
    let expected = expected_class(spec)?;
    let result = json!({
        "class": dw.class,
        "dw_point": dw.point.as_ref().map(|p| point_pairs(p.coords())),
        "dilation": dw.dilation,
        "fixed_point": dw.fixed_point.as_ref().map(point_pairs),
        "expected": expected.map(|(class, dilation)| json!({"class": class, "dilation": dilation})),
        "diagnostics": to_value(&dw.orbit_trace),
    });
    if let Some((class, _)) = expected {
        if class != dw.class {
            return Ok(Outcome::inconclusive(
                format!("numerical class {:?} contradicts the normal form ({:?})", dw.class, class),
                result,
            ));
        }
    }
    Ok(Outcome::ok(result))
}

fn reference_rate(spec: &MapSpec) -> Result<Option<f64>> {
    Ok(expected_class(spec)?.map(|(_, dilation)| -dilation.ln()))
}

pub fn divergence(spec: &MapSpec, point: Option<CVector>, cfg: &RunConfig) -> Result<Outcome> {
    let f = spec.build()?;
    let x = base_or(&f, point)?;
    let est = divergence_rate(&f, &x, &RateConfig { max_m: cfg.cap, tol: cfg.tol })?;
    let mut v = to_value(&est);
    v["reference"] = to_value(&reference_rate(spec)?);
    Ok(Outcome::ok(v))
}

pub fn step(spec: &MapSpec, point: Option<CVector>, gap: usize, cfg: &RunConfig) -> Result<Outcome> {
    let f = spec.build()?;
    let x = base_or(&f, point)?;
    let est = hyperbolic_step(&f, &x, gap, &StepConfig { window: 20, tol: cfg.tol, cap: cfg.cap })?;
    Ok(Outcome::ok(est))
}

pub fn model(spec: &MapSpec, cfg: &RunConfig) -> Result<Outcome> {
    let consistency = ConsistencyConfig {
        members: cfg.samples,
        non_members: cfg.samples,
        seed: cfg.seed,
        ..ConsistencyConfig::default()
    };
    let nf = spec
        .normal_form()?
        .ok_or_else(|| Error::InvalidInput("model expects an lft_hyperbolic or lft_parabolic spec".into()))?;
    let (report, g, limit_metric) = match &nf {
        NormalForm::Hyperbolic(h) => {
            let g = h.to_self_map()?;
            let dim_cfg = DimensionConfig { cap: cfg.cap.min(DIMENSION_CAP), eig_tol: cfg.eig_tol, window: 10 };
            let metric = canonical_dimension(&g, &Domain::Siegel.base_point(g.dim()), &dim_cfg)?;
            (canonical_semi_model_hyperbolic(h, cfg.samples, cfg.seed)?, g, Some(metric))
        }
        NormalForm::Parabolic(p) => (parabolic_model_dichotomy(p, cfg.samples, cfg.seed)?, p.to_self_map()?, None),
    };
    let check = model_domain_consistency(&g, &report.omega, &consistency)?;
    Ok(Outcome::ok(json!({
        "k": report.base_dimension,
        "semi_model": to_value(&report),
        "omega_consistency": to_value(&check),
        "limit_metric": limit_metric.as_ref().map(|m| json!({
            "rank": m.rank,
            "tolerance": m.tolerance,
            "eigenvalue_trajectories": m.eigenvalue_trajectories,
        })),
    })))
}

/// `λ_f` from the spec when it is known in closed form, otherwise from the
/// Denjoy–Wolff estimate of the ball map.
fn dilation_of(spec: &MapSpec, cfg: &RunConfig) -> Result<f64> {
    if let Some((_, d)) = expected_class(spec)? {
        return Ok(d);
    }
    let f = spec.ball_map()?;
    let dw = denjoy_wolff(&f, &CVector::zeros(f.dim()), &dw_config(cfg))?;
    dw.dilation.ok_or_else(|| Error::PreconditionFailed("map is elliptic".into()))
}

fn samples_in(f: &SelfMap, n: usize, seed: u64) -> Vec<CVector> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|_| match f.domain() {
            Domain::Ball => sampling::ball_point(&mut rng, f.dim(), 0.9),
            Domain::Siegel => sampling::siegel_point(&mut rng, f.dim()),
        })
        .collect()
}

fn solve_valiron(spec: &MapSpec, cfg: &RunConfig) -> Result<(SelfMap, ValironSolution, Vec<CVector>)> {
    let f = spec.build()?;
    let lambda_f = dilation_of(spec, cfg)?;
    let pts = samples_in(&f, cfg.samples, cfg.seed);
    let sol = valiron_solve(&f, lambda_f, &pts, &ValironConfig { cap: cfg.cap, ..ValironConfig::default() })?;
    Ok((f, sol, pts))
}

pub fn valiron(spec: &MapSpec, point: Option<CVector>, cfg: &RunConfig) -> Result<Outcome> {
    let (f, sol, _) = solve_valiron(spec, cfg)?;
    let mut v = to_value(&sol.summary());
    if let Some(z) = point {
        check_point(&f, &z)?;
        let t = sol.theta(&z)?;
        v["theta_at_point"] = json!([t.re, t.im]);
    }
    Ok(Outcome::ok(v))
}

pub fn abel(spec: &MapSpec, point: Option<CVector>, cfg: &RunConfig) -> Result<Outcome> {
    let (f, sol, pts) = solve_valiron(spec, cfg)?;
    let abel = abel_solve(&f, &sol, &pts)?;
    let mut v = json!({ "valiron": to_value(&sol.summary()), "abel": to_value(&abel.summary()) });
    if let Some(z) = point {
        check_point(&f, &z)?;
        let t = abel.theta_abel(&z)?;
        v["theta_at_point"] = json!([t.re, t.im]);
    }
    Ok(Outcome::ok(v))
}

/// Runs every semigroup check; a failing part is reported in place and
/// sets the exit code, the remaining parts still run.
pub fn semigroup(spec: &MapSpec, point: Option<CVector>, cfg: &RunConfig) -> Result<Outcome> {
    let phi: Semigroup =
        spec.semigroup()?.ok_or_else(|| Error::InvalidInput("semigroup expects a semigroup_affine_siegel spec".into()))?;
    let x = match point {
        Some(z) => {
            check_point(&phi.at(1.0)?, &z)?;
            z
        }
        None => Domain::Siegel.base_point(phi.dim()),
    };
    let mut parts = serde_json::Map::new();
    let mut worst: Option<Error> = None;
    let mut record = |name: &str, r: Result<Value>| match r {
        Ok(v) => {
            parts.insert(name.into(), v);
        }
        Err(e) => {
            parts.insert(name.into(), json!({ "error": e.to_string() }));
            if worst.as_ref().is_none_or(|w| super::exit_code(w) < super::exit_code(&e)) {
                worst = Some(e);
            }
        }
    };
    record("law", phi.law_residual(cfg.samples, cfg.seed).map(|r| to_value(&r)));
    let rate_cfg = SemigroupRateConfig { tol: cfg.tol, ..SemigroupRateConfig::default() };
    record("rate", semigroup_rate(&phi, &x, &rate_cfg).map(|r| to_value(&r)));
    let lin_cfg = RateConfig { max_m: cfg.cap, tol: cfg.tol };
    record("linearity", rate_linearity_check(&phi, &x, &SEMIGROUP_TIMES, &lin_cfg).map(|r| to_value(&r)));
    let classification = classify_semigroup(&phi, &dw_config(cfg));
    let exponent = classification.as_ref().ok().and_then(|c| c.exponent).filter(|e| *e > 1e-12);
    record("classification", classification.map(|r| to_value(&r)));
    if let Some(exponent) = exponent {
        let pts = samples_in(&phi.at(1.0)?, cfg.samples.min(100), cfg.seed);
        let vcfg = ValironConfig { cap: cfg.cap, ..ValironConfig::default() };
        record("valiron", semigroup_valiron(&phi, exponent, &SEMIGROUP_TIMES, &pts, &vcfg).map(|r| to_value(&r)));
    }
    let result = Value::Object(parts);
    Ok(match worst {
        None => Outcome::ok(result),
        Some(e) => Outcome::partial(&e, result),
    })
}

/// One orbit sample in outer coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub m: usize,
    pub coords: Vec<[f64; 2]>,
    pub norm: f64,
    pub distance_from_start: f64,
    pub step_distance: f64,
}

pub struct OrbitData {
    pub rows: Vec<OrbitRow>,
    /// Why the orbit stopped before `steps`.
    pub error: Option<String>,
}

/// `steps + 1` rows; distances are taken in the native chart of the map.
pub fn orbit(spec: &MapSpec, point: Option<CVector>, steps: usize) -> Result<OrbitData> {
    let f = spec.build()?;
    let z0 = base_or(&f, point)?;
    let view = f.native_view();
    let domain = view.domain();
    let y0 = view.pull(&z0);
    let mut ys = vec![y0.clone()];
    let mut error = None;
    for step in 1..=steps + 1 {
        let next = match view.core.apply(ys.last().expect("nonempty")) {
            Ok(y) => y,
            Err(Error::DomainEscape { margin, .. }) => {
                error = Some(Error::DomainEscape { step, margin }.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let big = crate::linalg::max_abs(&next);
        if big > COORDINATE_LIMIT {
            error = Some(format!("iterate {step}: coordinate magnitude {big:e} exceeds limit"));
            break;
        }
        ys.push(next);
    }
    // The last row needs its successor for the step distance.
    let complete = ys.len() == steps + 2;
    let rows_available = if complete { steps + 1 } else { ys.len().saturating_sub(1) };
    let mut rows = Vec::with_capacity(rows_available);
    for m in 0..rows_available {
        let outer = view.push(&ys[m]);
        rows.push(OrbitRow {
            m,
            coords: point_pairs(&outer),
            norm: outer.norm(),
            distance_from_start: domain.distance(&y0, &ys[m])?,
            step_distance: domain.distance(&ys[m], &ys[m + 1])?,
        });
    }
    if !complete && error.is_none() {
        error = Some("orbit ended early".into());
    }
    Ok(OrbitData { rows, error })
}

/// 17 significant digits, locale independent.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn orbit_csv(data: &OrbitData, dim: usize) -> String {
    let mut out = String::from("m");
    for j in 1..=dim {
        out.push_str(&format!(",re_z{j},im_z{j}"));
    }
    out.push_str(",norm,k_z0_zm,k_zm_zm1\n");
    for r in &data.rows {
        out.push_str(&r.m.to_string());
        for c in &r.coords {
            out.push_str(&format!(",{},{}", num(c[0]), num(c[1])));
        }
        out.push_str(&format!(",{},{},{}\n", num(r.norm), num(r.distance_from_start), num(r.step_distance)));
    }
    if let Some(e) = &data.error {
        out.push_str(&format!("error,\"{}\"\n", e.replace('"', "'")));
    }
    out
}
