use kobdyn::ball_geometry::{cayley, cayley_inverse, BallAutomorphism, BallPoint, Domain};
use kobdyn::cli::spec::MapSpec;
use kobdyn::cli::verify::transported_dilation;
use kobdyn::invariants::{divergence_rate, model_distance, ModelDistanceConfig, RateConfig};
use kobdyn::linalg::{CMatrix, CVector, C64};
use kobdyn::self_maps::SelfMap;
use kobdyn::semigroups::{AffineSiegelFlow, Semigroup};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Point of `B^q` at radius `r ≤ max_r`.
fn ball(q: usize, max_r: f64) -> impl Strategy<Value = CVector> {
    (prop::collection::vec(complex(), q), 0.0..max_r).prop_filter_map("zero direction", |(v, r)| {
        let v = CVector::from_vec(v);
        let n = v.norm();
        (n > 1e-3).then(|| v * C64::new(r / n, 0.0))
    })
}

fn ball_pair(max_r: f64) -> impl Strategy<Value = (CVector, CVector)> {
    (1usize..=4).prop_flat_map(move |q| (ball(q, max_r), ball(q, max_r)))
}

fn automorphism(q: usize) -> impl Strategy<Value = BallAutomorphism> {
    (ball(q, 0.9), prop::collection::vec(complex(), q * q)).prop_map(move |(w, g)| {
        let u = CMatrix::from_vec(q, q, g).qr().q();
        BallAutomorphism::new(&BallPoint::new(w).unwrap(), u).unwrap()
    })
}

fn d(a: &CVector, b: &CVector) -> f64 {
    Domain::Ball.distance(a, b).unwrap()
}

fn mix(a: &CVector, b: &CVector, t: f64) -> CVector {
    a * C64::new(t, 0.0) + b * C64::new(1.0 - t, 0.0)
}

/// `(2 z_1, √2 u, v/2)` on `H^3`.
fn contracting_form() -> SelfMap {
    let diag = CVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(2f64.sqrt(), 0.0), C64::new(0.5, 0.0)]);
    SelfMap::affine(Domain::Siegel, CMatrix::from_diagonal(&diag), CVector::zeros(3)).unwrap()
}

fn siegel_point() -> impl Strategy<Value = CVector> {
    (complex(), complex(), complex(), 0.05..3.0f64).prop_map(|(z1, u, v, h)| {
        let im = u.norm_sqr() + v.norm_sqr() + h;
        CVector::from_vec(vec![C64::new(z1.re, im), u, v])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn segments_between_pairs_are_short(
        ((x, y), (z, w)) in (1usize..=4).prop_flat_map(|q| ((ball(q, 0.999), ball(q, 0.999)), (ball(q, 0.999), ball(q, 0.999)))),
        t in 0.0..=1.0f64,
    ) {
        let lhs = d(&mix(&x, &y, t), &mix(&z, &w, t));
        prop_assert!(lhs <= d(&x, &z).max(d(&y, &w)) + 1e-10);
    }

    #[test]
    fn segment_stays_within_endpoint_distance((x, y) in ball_pair(0.999), t in 0.0..=1.0f64, s in 0.0..=1.0f64) {
        prop_assert!(d(&mix(&x, &y, t), &mix(&x, &y, s)) <= d(&x, &y) + 1e-10);
    }

    #[test]
    fn distance_is_a_metric((x, y) in ball_pair(0.99), t in 0.0..=1.0f64) {
        let m = mix(&x, &y, t);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12);
        prop_assert!(d(&x, &x) == 0.0);
        prop_assert!(d(&x, &y) <= d(&x, &m) + d(&m, &y) + 1e-10);
    }

    #[test]
    fn automorphisms_are_isometries(
        (phi, z, w) in (1usize..=4).prop_flat_map(|q| (automorphism(q), ball(q, 0.95), ball(q, 0.95))),
    ) {
        let before = d(&z, &w);
        let after = d(&phi.apply(&z), &phi.apply(&w));
        prop_assert!((before - after).abs() <= 1e-10, "{before} vs {after}");
        prop_assert!((phi.apply_inverse(&phi.apply(&z)) - &z).norm() <= 1e-12);
    }

    #[test]
    fn cayley_round_trip(z in (1usize..=4).prop_flat_map(|q| ball(q, 0.95))) {
        let p = BallPoint::new(z.clone()).unwrap();
        let back = cayley_inverse(&cayley(&p).unwrap()).unwrap();
        prop_assert!((back.coords() - &z).norm() <= 1e-12);
    }

    #[test]
    fn cayley_is_an_isometry((z, w) in ball_pair(0.9)) {
        let (pz, pw) = (cayley(&BallPoint::new(z.clone()).unwrap()).unwrap(), cayley(&BallPoint::new(w.clone()).unwrap()).unwrap());
        let siegel = Domain::Siegel.distance(pz.coords(), pw.coords()).unwrap();
        prop_assert!((siegel - d(&z, &w)).abs() <= 1e-9 * d(&z, &w).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orbit_distances_are_subadditive(lambda in 1.1..6.0f64, x in ball(2, 0.9)) {
        // Siegel coordinates keep the whole orbit representable.
        let diag = CVector::from_vec(vec![C64::new(lambda, 0.0), C64::new(0.0, lambda.sqrt())]);
        let f = SelfMap::affine(Domain::Siegel, CMatrix::from_diagonal(&diag), CVector::zeros(2)).unwrap();
        let y = cayley(&BallPoint::new(x).unwrap()).unwrap().into_coords();
        let mut orbit = vec![y.clone()];
        for _ in 0..40 {
            let next = f.eval(orbit.last().unwrap());
            orbit.push(next);
        }
        let a: Vec<f64> = orbit.iter().map(|z| Domain::Siegel.distance(&y, z).unwrap()).collect();
        for m in 1..20 {
            for n in 1..20 {
                prop_assert!(a[m + n] <= a[m] + a[n] + 1e-10 * a[m + n].max(1.0));
            }
        }
    }

    #[test]
    fn rate_matches_dilation(lambda in 1.1..6.0f64, x in ball(2, 0.9)) {
        let f = transported_dilation(lambda, 2).unwrap();
        let est = divergence_rate(&f, &x, &RateConfig { max_m: 2000, tol: 1e-8 }).unwrap();
        prop_assert!((est.c - lambda.ln()).abs() < 1e-6);
        prop_assert!(est.c <= est.fekete_inf() + 1e-12);
    }

    #[test]
    fn displacement_is_conjugation_invariant(phi in automorphism(2), z in ball(2, 0.95), lambda in 1.1..4.0f64) {
        let f = transported_dilation(lambda, 2).unwrap();
        let g = f.clone().conjugate_by(phi.clone()).unwrap();
        let lhs = g.displacement(&phi.apply(&z)).unwrap();
        let rhs = f.displacement(&z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn model_distance_is_an_invariant_pseudo_distance(z in siegel_point(), w in siegel_point(), v in siegel_point()) {
        let g = contracting_form();
        let cfg = ModelDistanceConfig::default();
        let dzw = model_distance(&g, &z, &w, &cfg).unwrap();
        let dwz = model_distance(&g, &w, &z, &cfg).unwrap();
        let dzv = model_distance(&g, &z, &v, &cfg).unwrap();
        let dvw = model_distance(&g, &v, &w, &cfg).unwrap();
        let k = Domain::Siegel.distance(&z, &w).unwrap();
        prop_assert!((dzw - dwz).abs() <= 1e-9 * dzw.max(1.0));
        prop_assert!(dzw <= dzv + dvw + 1e-9 * dzw.max(1.0));
        prop_assert!(dzw <= k + 1e-10 * k.max(1.0));
        let pushed = model_distance(&g, &g.eval(&z), &g.eval(&w), &cfg).unwrap();
        prop_assert!((pushed - dzw).abs() <= 1e-9 * dzw.max(1.0));
    }

    #[test]
    fn affine_flows_satisfy_the_semigroup_law(
        rate in 0.0..2.0f64,
        drift in (-1.0..1.0f64, 0.0..1.0f64),
        omega in -2.0..2.0f64,
        mu in (-1.0..0.0f64, -2.0..2.0f64),
    ) {
        let flow = AffineSiegelFlow {
            rate,
            drift: C64::new(drift.0, drift.1),
            rotations: vec![omega],
            v_exponents: vec![C64::new(mu.0 + rate / 2.0, mu.1)],
        };
        let phi = Semigroup::affine_siegel(flow).unwrap();
        let law = phi.law_residual(20, 1).unwrap();
        prop_assert!(law.law_residual < 1e-10 && law.identity_residual <= 1e-12);
    }

    #[test]
    fn map_specs_round_trip(lambda in 1.01..8.0f64, im_b in 0.0..0.99f64, re_b in -1.0..1.0f64) {
        let text = format!(
            r#"{{"kind": "lft_hyperbolic", "lambda": {lambda}, "b": [{re_b}, {}], "p": 1}}"#,
            im_b * (lambda - 1.0)
        );
        let spec = MapSpec::parse(&text).unwrap();
        let again = MapSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(spec, again);
    }
}
