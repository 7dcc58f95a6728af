//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show.

use std::time::{Duration, Instant};

use kobdyn::ball_geometry::{
    cayley, cayley_inverse, BallAutomorphism, BallPoint, BoundaryPoint, Domain, SequenceConfig,
};
use kobdyn::cli::verify::{shipped_maps, transported_dilation, transported_translation};
use kobdyn::functional_equations::{abel_solve, valiron_growth, valiron_solve, ValironConfig};
use kobdyn::invariants::{
    canonical_dimension, divergence_rate, hyperbolic_step, step_limit_formula_check, DimensionConfig, RateConfig,
    StepConfig,
};
use kobdyn::lft_models::{
    canonical_semi_model_hyperbolic, model_domain_consistency, parabolic_model_dichotomy, ConsistencyConfig,
    HyperbolicLftForm, ParabolicCase, ParabolicLftForm, TauKind, UpperBoundPolicy,
};
use kobdyn::linalg::{c, CMatrix, CVector, C64};
use kobdyn::sampling::{self, admissible_sequence, koranyi_sequence};
use kobdyn::self_maps::{julia_check, DenjoyWolffData, SelfMap, JULIA_MARGIN_TOL};
use kobdyn::semigroups::{rate_linearity_check, AffineSiegelFlow, Semigroup};

type Outcome = Result<String, String>;

fn require(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const DILATIONS: [f64; 3] = [1.5, 2.0, 4.0];

fn rate(f: &SelfMap, max_m: usize) -> Result<f64, String> {
    let x = CVector::zeros(f.dim());
    divergence_rate(f, &x, &RateConfig { max_m, tol: 1e-8 }).map(|e| e.c).map_err(err)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for &lambda in &DILATIONS {
        let f = transported_dilation(lambda, 1).map_err(err)?;
        let start = Instant::now();
        let c_hat = rate(&f, 2000)?;
        slowest = slowest.max(start.elapsed());
        worst = worst.max((c_hat - lambda.ln()).abs());
    }
    require(
        worst < 1e-4 && slowest < Duration::from_secs(5),
        format!("max |c - log lambda| = {worst:.3e}, slowest map {slowest:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for &lambda in &DILATIONS {
        let f = transported_dilation(lambda, 1).map_err(err)?;
        let c1 = rate(&f, 2000)?;
        for k in [2usize, 3] {
            let ck = rate(&f.power(k).map_err(err)?, 2000)?;
            worst = worst.max((ck - k as f64 * c1).abs());
        }
    }
    require(worst < 1e-4, format!("max |c(f^k) - k c(f)| = {worst:.3e}"))
}

fn criterion_3() -> Outcome {
    let shift = transported_translation(c(1.0, 0.0)).map_err(err)?;
    let c_hat = rate(&shift, 10_000)?;
    let cfg = StepConfig { window: 20, tol: 1e-6, cap: 100_000 };
    let origin = CVector::zeros(1);
    let up = transported_translation(c(0.0, 1.0)).map_err(err)?;
    let s_up = hyperbolic_step(&up, &origin, 1, &cfg).map_err(err)?.limit;
    // The ball origin is the Cayley image of i.
    let s_shift = hyperbolic_step(&shift, &origin, 1, &cfg).map_err(err)?.limit;
    let expected = 1.5f64.acosh();
    require(
        c_hat < 1e-3 && s_up < 1e-4 && (s_shift - expected).abs() <= 1e-6,
        format!("c(z+1) = {c_hat:.3e}, step(z+i) = {s_up:.3e}, |step(z+1) - acosh 1.5| = {:.3e}", (s_shift - expected).abs()),
    )
}

fn criterion_4() -> Outcome {
    let seq = admissible_sequence(BoundaryPoint::e1(1).coords(), 0.0, 0.0, 30)
        .into_iter()
        .map(BallPoint::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let cfg = SequenceConfig::default();
    let dil = transported_dilation(2.0, 1).map_err(err)?;
    let dw = DenjoyWolffData::known(BoundaryPoint::e1(1), 0.5, 1e-12);
    let hyperbolic = step_limit_formula_check(&dil, &dw, c(1.0, 0.0), &seq, &cfg).map_err(err)?;
    let hyperbolic_gap = (hyperbolic.empirical - 2f64.ln()).abs();
    let shift = transported_translation(c(1.0, 0.0)).map_err(err)?;
    let dw = DenjoyWolffData::known(BoundaryPoint::e1(1), 1.0, 1e-12);
    let parabolic = step_limit_formula_check(&shift, &dw, c(1.0, 0.0), &seq, &cfg).map_err(err)?;
    require(
        hyperbolic_gap < 1e-4 && parabolic.empirical.abs() < 1e-4,
        format!("|limit - log 2| = {hyperbolic_gap:.3e}, parabolic limit = {:.3e}", parabolic.empirical),
    )
}

fn criterion_5() -> Outcome {
    let maps = shipped_maps().map_err(err)?;
    let mut violations = 0;
    let mut total = 0;
    let mut worst = f64::NEG_INFINITY;
    for (k, m) in maps.iter().enumerate() {
        let rep = julia_check(&m.map, &m.dw, &[0.25, 1.0, 4.0], 3334, k as u64).map_err(err)?;
        violations += rep.violations;
        total += rep.radii.iter().map(|r| r.accepted).sum::<usize>();
        worst = worst.max(rep.worst_margin);
        if rep.radii.iter().map(|r| r.accepted).sum::<usize>() < 10_000 {
            return Err(format!("{}: too few samples", m.name));
        }
    }
    require(
        violations == 0 && worst <= JULIA_MARGIN_TOL,
        format!("{} maps, {total} horosphere points, {violations} violations, worst margin {worst:.3e}", maps.len()),
    )
}

/// `q = 3` hyperbolic forms with `p = 1, 2, 3`.
fn hyperbolic_forms() -> Vec<HyperbolicLftForm> {
    let r2 = 2f64.sqrt();
    vec![
        HyperbolicLftForm {
            lambda: 2.0,
            b: c(0.0, 0.5),
            d: vec![],
            a: vec![vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.7)]],
            c: vec![c(0.2, 0.0), c(0.1, 0.1)],
            p: 1,
        },
        HyperbolicLftForm {
            lambda: 2.0,
            b: c(0.0, 0.5),
            d: vec![c(0.0, r2)],
            a: vec![vec![c(0.5, 0.0)]],
            c: vec![c(0.2, 0.1)],
            p: 2,
        },
        HyperbolicLftForm { lambda: 2.0, b: c(0.0, 0.5), d: vec![c(r2, 0.0), C64::from_polar(r2, 1.0)], a: vec![], c: vec![], p: 3 },
    ]
}

fn criterion_6() -> Outcome {
    let mut worst_residual: f64 = 0.0;
    let mut worst_rate: f64 = 0.0;
    let mut ranks = Vec::new();
    for form in hyperbolic_forms() {
        let h = form.validate(UpperBoundPolicy::Enforce).map_err(err)?;
        let rep = canonical_semi_model_hyperbolic(&h, 1000, 3).map_err(err)?;
        worst_residual = worst_residual.max(rep.intertwining_residual.unwrap_or(f64::INFINITY));
        let g = h.to_self_map().map_err(err)?;
        let base = CVector::from_vec(vec![c(0.0, 1.0), c(0.1, 0.0), c(0.0, 0.1)]);
        let cfg = DimensionConfig { cap: 100, eig_tol: 1e-6, window: 10 };
        let k = canonical_dimension(&g, &base, &cfg).map_err(err)?.rank;
        ranks.push((form.p, k));
        let tau = rep.tau_params.to_self_map().map_err(err)?.ok_or("no tau")?;
        let cfg = RateConfig { max_m: 2000, tol: 1e-8 };
        let c_g = divergence_rate(&g, &base, &cfg).map_err(err)?.c;
        let c_tau = divergence_rate(&tau, &rep.retraction.apply(&base), &cfg).map_err(err)?.c;
        worst_rate = worst_rate.max((c_g - c_tau).abs());
    }
    require(
        worst_residual <= 1e-13 && ranks.iter().all(|(p, k)| p == k) && worst_rate < 1e-4,
        format!("residual {worst_residual:.3e}, (p, k) = {ranks:?}, |c(g) - c(tau)| = {worst_rate:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let trivial = ParabolicLftForm {
        a: vec![c(0.5, 0.0)],
        b: c(0.3, 1.0),
        c: vec![c(0.1, 0.0)],
        d: vec![],
        a_block: vec![vec![c(0.5, 0.0)]],
        r: 2,
        p: 2,
    };
    let t = trivial.validate().map_err(err)?;
    let rep_t = parabolic_model_dichotomy(&t, 1000, 5).map_err(err)?;
    let slab = ParabolicLftForm {
        a: vec![c(0.5, 0.0)],
        b: c(0.3, 0.25),
        c: vec![],
        d: vec![c(0.0, 1.0)],
        a_block: vec![vec![c(0.5, 0.0), c(0.1, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.6)]],
        r: 2,
        p: 3,
    };
    let s = slab.validate().map_err(err)?;
    if s.validation().case != ParabolicCase::Parabolic {
        return Err("case (ii) form not recognized".into());
    }
    let rep_s = parabolic_model_dichotomy(&s, 1000, 5).map_err(err)?;
    let residual = rep_s.intertwining_residual.unwrap_or(f64::INFINITY);
    let cfg = ConsistencyConfig { members: 1000, non_members: 1000, horizon: 200, seed: 9 };
    let check = model_domain_consistency(&s.to_self_map().map_err(err)?, &rep_s.omega, &cfg).map_err(err)?;
    require(
        rep_t.tau_kind == TauKind::Trivial
            && rep_s.tau_kind == TauKind::Parabolic
            && residual <= 1e-13
            && check.members_tested == 1000
            && check.non_members_tested == 1000
            && check.contradictions == 0,
        format!(
            "case (i) {:?}, case (ii) {:?} residual {residual:.3e}, {} + {} samples, {} contradictions",
            rep_t.tau_kind, rep_s.tau_kind, check.members_tested, check.non_members_tested, check.contradictions
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst_valiron: f64 = 0.0;
    let mut worst_abel: f64 = 0.0;
    let mut rng = sampling::rng(11);
    for form in hyperbolic_forms() {
        let h = form.validate(UpperBoundPolicy::Enforce).map_err(err)?;
        let g = h.to_self_map().map_err(err)?;
        let pts: Vec<CVector> = (0..1000).map(|_| sampling::siegel_point(&mut rng, g.dim())).collect();
        let sol = valiron_solve(&g, 1.0 / form.lambda, &pts, &ValironConfig::default()).map_err(err)?;
        let abel = abel_solve(&g, &sol, &pts).map_err(err)?;
        worst_valiron = worst_valiron.max(sol.residual_sup);
        worst_abel = worst_abel.max(abel.residual_sup);
    }
    let f = transported_dilation(2.0, 2).map_err(err)?;
    let pts: Vec<CVector> = (0..1000).map(|_| sampling::ball_point(&mut rng, 2, 0.9)).collect();
    let sol = valiron_solve(&f, 0.5, &pts, &ValironConfig::default()).map_err(err)?;
    let mut monotone = 0;
    for _ in 0..8 {
        let seq = koranyi_sequence(&mut rng, BoundaryPoint::e1(2).coords(), 30);
        let (_, increasing) = valiron_growth(&sol, &seq, 10).map_err(err)?;
        monotone += increasing as usize;
    }
    require(
        worst_valiron < 1e-10 && worst_abel < 1e-10 && sol.residual_sup < 1e-10 && monotone == 8,
        format!(
            "Valiron residual {worst_valiron:.3e}, Abel residual {worst_abel:.3e}, transported {:.3e}, {monotone}/8 sequences grow",
            sol.residual_sup
        ),
    )
}

fn criterion_9() -> Outcome {
    let phi = Semigroup::affine_siegel(AffineSiegelFlow {
        rate: 1.0,
        drift: c(0.0, 0.0),
        rotations: vec![],
        v_exponents: vec![],
    })
    .map_err(err)?;
    let x = Domain::Siegel.base_point(1);
    let rep = rate_linearity_check(&phi, &x, &[0.5, 1.0, 2.0, 4.0], &RateConfig { max_m: 2000, tol: 1e-8 }).map_err(err)?;
    let law = phi.law_residual(100, 13).map_err(err)?;
    require(
        (rep.slope - 1.0).abs() < 1e-5 && rep.max_deviation < 1e-5 && law.law_residual < 1e-10,
        format!("slope {:.12}, max deviation {:.3e}, law residual {:.3e}", rep.slope, rep.max_deviation, law.law_residual),
    )
}

fn automorphism(rng: &mut sampling::SeededRng, q: usize) -> Result<BallAutomorphism, String> {
    let w = BallPoint::new(sampling::ball_point(rng, q, 0.8)).map_err(err)?;
    let g = CMatrix::from_fn(q, q, |_, _| sampling::ball_point(rng, 1, 1.0)[0]);
    BallAutomorphism::new(&w, g.qr().q()).map_err(err)
}

fn criterion_10(started: Instant) -> Outcome {
    use rand::Rng;
    let mut rng = sampling::rng(17);
    let d = |a: &CVector, b: &CVector| Domain::Ball.distance(a, b).map_err(err);
    let mix = |a: &CVector, b: &CVector, t: f64| a * C64::new(t, 0.0) + b * C64::new(1.0 - t, 0.0);
    let (mut convex1, mut convex2): (f64, f64) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 0..10_000 {
        let q = 1 + k % 3;
        let [x, y, z, w]: [CVector; 4] = std::array::from_fn(|_| sampling::ball_point(&mut rng, q, 0.999));
        let t: f64 = rng.random();
        let s: f64 = rng.random();
        convex1 = convex1.max(d(&mix(&x, &y, t), &mix(&z, &w, t))? - d(&x, &z)?.max(d(&y, &w)?));
        convex2 = convex2.max(d(&mix(&x, &y, t), &mix(&x, &y, s))? - d(&x, &y)?);
    }
    let mut isometry: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for k in 0..1000 {
        let q = 1 + k % 3;
        let phi = automorphism(&mut rng, q)?;
        let z = sampling::ball_point(&mut rng, q, 0.95);
        let w = sampling::ball_point(&mut rng, q, 0.95);
        isometry = isometry.max((d(&z, &w)? - d(&phi.apply(&z), &phi.apply(&w))?).abs());
        let p = BallPoint::new(z.clone()).map_err(err)?;
        let back = cayley_inverse(&cayley(&p).map_err(err)?).map_err(err)?;
        round_trip = round_trip.max((back.coords() - &z).norm());
    }
    let elapsed = started.elapsed();
    require(
        convex1 <= 1e-10 && convex2 <= 1e-10 && isometry <= 1e-10 && round_trip <= 1e-12 && elapsed < Duration::from_secs(60),
        format!(
            "convexity margins {convex1:.3e} / {convex2:.3e}, isometry {isometry:.3e}, round trip {round_trip:.3e}, suite time {elapsed:.2?}"
        ),
    )
}

fn main() {
    let started = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("divergence rate of dilations", Box::new(criterion_1)),
        ("rate of powers", Box::new(criterion_2)),
        ("parabolic rate and step dichotomy", Box::new(criterion_3)),
        ("step limit on radial sequences", Box::new(criterion_4)),
        ("horosphere contraction", Box::new(criterion_5)),
        ("hyperbolic canonical semi-model", Box::new(criterion_6)),
        ("parabolic dichotomy", Box::new(criterion_7)),
        ("Valiron and Abel residuals", Box::new(criterion_8)),
        ("semigroup rate linearity", Box::new(criterion_9)),
        ("geometry kernel", Box::new(move || criterion_10(started))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {:>2} {tag} {name}: {detail} [{:.2?}]", k + 1, t.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
