//! Property suites behind `kobdyn verify`.

use serde::Serialize;

use super::config::RunConfig;
use crate::ball_geometry::{
    cayley, cayley_inverse, BallAutomorphism, BallPoint, BoundaryPoint, Domain, SequenceConfig,
};
use crate::error::{Error, Result};
use crate::invariants::{
    divergence_rate, lindelof_hypotheses, step_limit_formula, step_limit_formula_check, LindelofConfig, RateConfig,
};
use crate::lft_models::{HyperbolicLftForm, ParabolicLftForm, UpperBoundPolicy};
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::sampling::{self, admissible_sequence};
use crate::self_maps::{denjoy_wolff, julia_check, DenjoyWolffData, SelfMap, JULIA_MARGIN_TOL};
use crate::semigroups::{rate_linearity_check, AffineSiegelFlow, Semigroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Convexity,
    Julia,
    Fekete,
    Steplimit,
    Conjugation,
    SemigroupLinearity,
    Lindelof,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Convexity,
        Suite::Julia,
        Suite::Fekete,
        Suite::Steplimit,
        Suite::Conjugation,
        Suite::SemigroupLinearity,
        Suite::Lindelof,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct Property {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Largest value of the checked quantity; the property holds when it
    /// does not exceed `tolerance`.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub properties: Vec<Property>,
}

struct Collector {
    suite: Suite,
    out: Vec<Property>,
}

impl Collector {
    fn check(&mut self, name: impl Into<String>, worst: f64, tolerance: f64) {
        self.out.push(Property {
            suite: self.suite,
            name: name.into(),
            passed: worst <= tolerance,
            worst_margin: worst,
            tolerance,
            detail: None,
        });
    }

    /// Records a failed computation as a failed property.
    fn outcome(&mut self, name: impl Into<String>, tolerance: f64, r: Result<f64>) {
        match r {
            Ok(worst) => self.check(name, worst, tolerance),
            Err(e) => self.out.push(Property {
                suite: self.suite,
                name: name.into(),
                passed: false,
                worst_margin: f64::INFINITY,
                tolerance,
                detail: Some(e.to_string()),
            }),
        }
    }
}

pub fn run(suite: Suite, cfg: &RunConfig) -> VerifyReport {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut properties = Vec::new();
    for s in suites {
        let mut col = Collector { suite: s, out: Vec::new() };
        match s {
            Suite::Convexity => convexity(&mut col, cfg),
            Suite::Julia => julia(&mut col, cfg),
            Suite::Fekete => fekete(&mut col, cfg),
            Suite::Steplimit => steplimit(&mut col),
            Suite::Conjugation => conjugation(&mut col, cfg),
            Suite::SemigroupLinearity => semigroup_linearity(&mut col, cfg),
            Suite::Lindelof => lindelof(&mut col),
            Suite::All => unreachable!(),
        }
        properties.extend(col.out);
    }
    VerifyReport { passed: properties.iter().all(|p| p.passed), properties }
}

// ---------------------------------------------------------------------------
// Shipped maps

/// A test map together with its closed-form Denjoy–Wolff data.
pub struct ShippedMap {
    pub name: String,
    pub map: SelfMap,
    pub dw: DenjoyWolffData,
}

fn hyperbolic_form(lambda: f64, q: usize) -> HyperbolicLftForm {
    let d = (0..q.saturating_sub(1)).map(|j| C64::from_polar(lambda.sqrt(), 0.7 * j as f64)).collect();
    HyperbolicLftForm { lambda, b: C64::new(0.0, 0.0), d, a: vec![], c: vec![], p: q }
}

/// `z ↦ λz` on `H^q` (rotating the `u` block), seen on the ball.
pub fn transported_dilation(lambda: f64, q: usize) -> Result<SelfMap> {
    SelfMap::cayley_transport(hyperbolic_form(lambda, q).validate(UpperBoundPolicy::Enforce)?.to_self_map()?)
}

/// `z ↦ z + b` on `H^1`, seen on the ball.
pub fn transported_translation(b: C64) -> Result<SelfMap> {
    let form = ParabolicLftForm { a: vec![], b, c: vec![], d: vec![], a_block: vec![], r: 1, p: 1 };
    SelfMap::cayley_transport(form.validate()?.to_self_map()?)
}

fn known(point: BoundaryPoint, dilation: f64) -> DenjoyWolffData {
    DenjoyWolffData::known(point, dilation, 1e-12)
}

fn sample_automorphism(rng: &mut sampling::SeededRng, q: usize) -> Result<BallAutomorphism> {
    let w = BallPoint::new(sampling::ball_point(rng, q, 0.6))?;
    let g = CMatrix::from_fn(q, q, |_, _| {
        let z = sampling::ball_point(rng, 1, 1.0);
        z[0]
    });
    let u = g.qr().q();
    BallAutomorphism::new(&w, u)
}

pub fn shipped_maps() -> Result<Vec<ShippedMap>> {
    let mut maps = Vec::new();
    for &lambda in &[1.5, 2.0, 4.0] {
        for q in [1, 2] {
            maps.push(ShippedMap {
                name: format!("dilation {lambda} in dimension {q}"),
                map: transported_dilation(lambda, q)?,
                dw: known(BoundaryPoint::e1(q), 1.0 / lambda),
            });
        }
    }
    maps.push(ShippedMap {
        name: "translation z+1".into(),
        map: transported_translation(c(1.0, 0.0))?,
        dw: known(BoundaryPoint::e1(1), 1.0),
    });
    let par = ParabolicLftForm { a: vec![c(0.5, 0.0)], b: c(0.3, 0.25), c: vec![], d: vec![], a_block: vec![], r: 2, p: 2 };
    maps.push(ShippedMap {
        name: "parabolic Heisenberg translation".into(),
        map: SelfMap::cayley_transport(par.validate()?.to_self_map()?)?,
        dw: known(BoundaryPoint::e1(2), 1.0),
    });
    let mut rng = sampling::rng(7);
    let phi = sample_automorphism(&mut rng, 2)?;
    let image = BoundaryPoint::normalized(&phi.apply(BoundaryPoint::e1(2).coords()))?;
    maps.push(ShippedMap {
        name: "conjugated dilation 2".into(),
        map: transported_dilation(2.0, 2)?.conjugate_by(phi)?,
        dw: known(image, 0.5),
    });
    Ok(maps)
}

// ---------------------------------------------------------------------------
// Suites

fn convexity(col: &mut Collector, cfg: &RunConfig) {
    use rand::Rng;
    let mut rng = sampling::rng(cfg.seed);
    let n = cfg.samples.saturating_mul(10);
    let (mut worst1, mut worst2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut err = None;
    for k in 0..n {
        let q = 2 + k % 2;
        let [x, y, z, w] = std::array::from_fn(|_| sampling::ball_point(&mut rng, q, 0.9999));
        let t: f64 = rng.random();
        let s: f64 = rng.random();
        let mix = |a: &CVector, b: &CVector, t: f64| a * C64::new(t, 0.0) + b * C64::new(1.0 - t, 0.0);
        let d = |a: &CVector, b: &CVector| Domain::Ball.distance(a, b);
        let r: Result<(f64, f64)> = (|| {
            let m1 = d(&mix(&x, &y, t), &mix(&z, &w, t))? - d(&x, &z)?.max(d(&y, &w)?);
            let m2 = d(&mix(&x, &y, t), &mix(&x, &y, s))? - d(&x, &y)?;
            Ok((m1, m2))
        })();
        match r {
            Ok((m1, m2)) => {
                worst1 = worst1.max(m1);
                worst2 = worst2.max(m2);
            }
            Err(e) => {
                err = Some(e);
                break;
            }
        }
    }
    match err {
        None => {
            col.check("segments between two pairs", worst1, 1e-10);
            col.check("segment inside a ball of radius k(x,y)", worst2, 1e-10);
        }
        Some(e) => col.outcome("convexity", 1e-10, Err(e)),
    }

    let r = (|| {
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.samples {
            let phi = sample_automorphism(&mut rng, 2)?;
            let z = sampling::ball_point(&mut rng, 2, 0.95);
            let w = sampling::ball_point(&mut rng, 2, 0.95);
            let before = Domain::Ball.distance(&z, &w)?;
            let after = Domain::Ball.distance(&phi.apply(&z), &phi.apply(&w))?;
            worst = worst.max((before - after).abs());
        }
        Ok(worst)
    })();
    col.outcome("automorphism isometry", 1e-10, r);

    let r = (|| {
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.samples {
            let z = BallPoint::new(sampling::ball_point(&mut rng, 3, 0.95))?;
            let back = cayley_inverse(&cayley(&z)?)?;
            worst = worst.max((back.coords() - z.coords()).norm());
        }
        Ok(worst)
    })();
    col.outcome("Cayley round trip", 1e-12, r);
}

fn julia(col: &mut Collector, cfg: &RunConfig) {
    let maps = match shipped_maps() {
        Ok(m) => m,
        Err(e) => return col.outcome("shipped maps", 0.0, Err(e)),
    };
    for (k, m) in maps.iter().enumerate() {
        let r = julia_check(&m.map, &m.dw, &[0.25, 1.0, 4.0], cfg.samples, cfg.seed.wrapping_add(k as u64));
        let r = r.map(|rep| if rep.violations > 0 { f64::INFINITY } else { rep.worst_margin });
        col.outcome(format!("horosphere contraction: {}", m.name), JULIA_MARGIN_TOL, r);
    }
}

/// `k(x, f^m x)` for `m = 0..=len` in the native chart of `f`.
fn orbit_distances(f: &SelfMap, x: &CVector, len: usize) -> Result<Vec<f64>> {
    let view = f.native_view();
    let y0 = view.pull(x);
    let orbit = view.orbit(&y0, len)?;
    orbit.points.iter().map(|y| view.domain().distance(&y0, y)).collect()
}

fn fekete(col: &mut Collector, cfg: &RunConfig) {
    let maps = match shipped_maps() {
        Ok(m) => m,
        Err(e) => return col.outcome("shipped maps", 0.0, Err(e)),
    };
    for m in &maps {
        let x = CVector::zeros(m.map.dim());
        let r = orbit_distances(&m.map, &x, 64).map(|a| {
            let mut worst = f64::NEG_INFINITY;
            for i in 1..a.len() {
                for j in 1..a.len() - i {
                    worst = worst.max((a[i + j] - a[i] - a[j]) / a[i + j].max(1.0));
                }
            }
            worst
        });
        col.outcome(format!("subadditivity of k(x, f^m x): {}", m.name), 1e-10, r);
        let dilation = m.dw.dilation.expect("shipped maps are not elliptic");
        let r = divergence_rate(&m.map, &x, &RateConfig { max_m: 2000, tol: cfg.tol })
            .map(|est| (est.c + dilation.ln()).abs());
        col.outcome(format!("rate equals -log dilation: {}", m.name), 1e-4, r);
    }
}

fn radial(q: usize, len: usize) -> Result<Vec<BallPoint>> {
    admissible_sequence(BoundaryPoint::e1(q).coords(), 0.0, 0.0, len).into_iter().map(BallPoint::new).collect()
}

fn steplimit(col: &mut Collector) {
    let cases: Vec<(String, Result<SelfMap>, f64)> = vec![
        ("dilation 2".into(), transported_dilation(2.0, 1), 0.5),
        ("dilation 2 in dimension 2".into(), transported_dilation(2.0, 2), 0.5),
        ("dilation 4".into(), transported_dilation(4.0, 1), 0.25),
        ("translation z+1".into(), transported_translation(c(1.0, 0.0)), 1.0),
    ];
    for (name, map, dilation) in cases {
        let r = (|| {
            let f = map?;
            let q = f.dim();
            let dw = known(BoundaryPoint::e1(q), dilation);
            let rep = step_limit_formula_check(&f, &dw, c(1.0, 0.0), &radial(q, 30)?, &SequenceConfig::default())?;
            if dilation < 1.0 {
                let expected = step_limit_formula(dilation, c(1.0, 0.0))?;
                if (expected - rep.formula).abs() > 1e-15 {
                    return Err(Error::ConsistencyFailure("formula mismatch".into()));
                }
            }
            Ok(rep.gap)
        })();
        col.outcome(format!("step limit on radial sequences: {name}"), 1e-4, r);
    }
}

fn conjugation(col: &mut Collector, cfg: &RunConfig) {
    let mut rng = sampling::rng(cfg.seed);
    let rate_cfg = RateConfig { max_m: 2000, tol: cfg.tol };
    for k in 0..3 {
        let r = (|| {
            let f = transported_dilation(2.0, 2)?;
            let phi = sample_automorphism(&mut rng, 2)?;
            let g = f.clone().conjugate_by(phi.clone())?;
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples.min(200) {
                let z = sampling::ball_point(&mut rng, 2, 0.95);
                worst = worst.max((g.displacement(&phi.apply(&z))? - f.displacement(&z)?).abs());
            }
            Ok((worst, f, g, phi))
        })();
        let (f, g, phi) = match r {
            Ok((worst, f, g, phi)) => {
                col.check(format!("displacement invariance #{k}"), worst, 1e-8);
                (f, g, phi)
            }
            Err(e) => {
                col.outcome(format!("displacement invariance #{k}"), 1e-8, Err(e));
                continue;
            }
        };
        let x = CVector::zeros(2);
        let r = (|| Ok((divergence_rate(&g, &x, &rate_cfg)?.c - divergence_rate(&f, &x, &rate_cfg)?.c).abs()))();
        col.outcome(format!("rate invariance #{k}"), 1e-4, r);
        let r = (|| {
            let dw = denjoy_wolff(&g, &x, &super::commands::dw_config(cfg))?;
            let point = dw.point.ok_or_else(|| Error::Inconclusive("no Denjoy-Wolff point".into()))?;
            let expected = phi.apply(BoundaryPoint::e1(2).coords());
            let dilation = dw.dilation.unwrap_or(f64::NAN);
            Ok((point.coords() - expected).norm().max((dilation - 0.5).abs()))
        })();
        col.outcome(format!("Denjoy-Wolff data transported #{k}"), 1e-3, r);
    }
}

/// `φ_t(z_1, u) = (e^t z_1, e^{t/2 + 0.3it} u)`.
pub fn exponential_flow() -> Result<Semigroup> {
    Semigroup::affine_siegel(AffineSiegelFlow {
        rate: 1.0,
        drift: c(0.0, 0.0),
        rotations: vec![0.3],
        v_exponents: vec![],
    })
}

fn semigroup_linearity(col: &mut Collector, cfg: &RunConfig) {
    let phi = match exponential_flow() {
        Ok(p) => p,
        Err(e) => return col.outcome("flow", 0.0, Err(e)),
    };
    let x = Domain::Siegel.base_point(phi.dim());
    let rep = rate_linearity_check(&phi, &x, &super::commands::SEMIGROUP_TIMES, &RateConfig { max_m: 2000, tol: cfg.tol });
    match rep {
        Ok(rep) => {
            col.check("max |c(phi_t) - t c(phi_1)|", rep.max_deviation, 1e-5);
            col.check("|slope - 1|", (rep.slope - 1.0).abs(), 1e-5);
        }
        Err(e) => col.outcome("rate linearity", 1e-5, Err(e)),
    }
    col.outcome("semigroup law", 1e-10, phi.law_residual(100, cfg.seed).map(|r| r.law_residual.max(r.identity_residual)));
}

fn lindelof(col: &mut Collector) {
    let cfg = LindelofConfig::default();
    let a = BoundaryPoint::e1(2);
    let r = (|| {
        let f = transported_dilation(2.0, 2)?;
        let mut orbit = vec![CVector::zeros(2)];
        for _ in 0..20 {
            let next = f.eval(orbit.last().expect("nonempty"));
            orbit.push(next);
        }
        let bound = f.displacement(&orbit[0])?;
        let seq = orbit.into_iter().map(|z| BallPoint::with_margin(z, 0.0)).collect::<Result<Vec<_>>>()?;
        let rep = lindelof_hypotheses(|z: &CVector| f.eval(z), &seq, &a, bound, &cfg)?;
        Ok(rep.witness_deviations.iter().copied().fold(0.0, f64::max))
    })();
    col.outcome("orbit of a dilation, h = the map", cfg.agreement_tol, r);

    let r = (|| {
        let seq = (1..40)
            .map(|n| BallPoint::new(CVector::from_vec(vec![c(1.0 - 0.5f64.powi(n), 0.0), c(0.0, 0.0)])))
            .collect::<Result<Vec<_>>>()?;
        let rep = lindelof_hypotheses(|z: &CVector| z * C64::new(0.5, 0.0), &seq, &a, 3f64.ln(), &cfg)?;
        Ok(rep.witness_deviations.iter().copied().fold(0.0, f64::max))
    })();
    col.outcome("dyadic radial sequence, h = z/2", cfg.agreement_tol, r);

    // Special distance log n on the slice through <z,a>a: hypothesis 2 must fail.
    let r = (|| {
        let seq = (2..5000)
            .map(|n| {
                let zeta = 1.0 - 1.0 / n as f64;
                let s = ((n as f64).ln() / 2.0).tanh();
                BallPoint::new(CVector::from_vec(vec![c(zeta, 0.0), c(s * (1.0 - zeta * zeta).sqrt(), 0.0)]))
            })
            .collect::<Result<Vec<_>>>()?;
        let loose = LindelofConfig { approach_tol: 0.1, ..cfg };
        match lindelof_hypotheses(|z: &CVector| z.clone(), &seq, &a, 8.0, &loose) {
            Err(Error::HypothesisFailed { bound: 2, .. }) => Ok(0.0),
            Err(e) => Err(e),
            Ok(_) => Ok(1.0),
        }
    })();
    col.outcome("tangential sequence rejected", 0.0, r);
}
