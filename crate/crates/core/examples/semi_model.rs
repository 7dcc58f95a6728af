//! Semi-model of a hyperbolic normal form with a nontrivial `v` block, and
//! the parabolic dichotomy.
use kobdyn::lft_models::{
    canonical_semi_model_hyperbolic, model_domain_consistency, parabolic_model_dichotomy, ConsistencyConfig,
    HyperbolicLftForm, ParabolicLftForm, UpperBoundPolicy,
};
use kobdyn::linalg::C64;

fn main() -> kobdyn::Result<()> {
    let form = HyperbolicLftForm {
        lambda: 2.0,
        b: C64::new(0.0, 0.5),
        d: vec![C64::new(2f64.sqrt(), 0.0)],
        a: vec![vec![C64::new(0.5, 0.0)]],
        c: vec![C64::new(0.2, 0.1)],
        p: 2,
    }
    .validate(UpperBoundPolicy::Enforce)?;
    let report = canonical_semi_model_hyperbolic(&form, 500, 1)?;
    println!("hyperbolic: base dimension {}, Omega: {}", report.base_dimension, report.omega_description);
    println!("  intertwining residual {:?}", report.intertwining_residual);
    let consistency = model_domain_consistency(&form.to_self_map()?, &report.omega, &ConsistencyConfig::default())?;
    println!("  Omega contradictions {} (longest entry {} steps)", consistency.contradictions, consistency.max_entry_steps);

    for b in [C64::new(0.0, 1.0), C64::new(0.0, 0.25)] {
        let form = ParabolicLftForm {
            a: vec![C64::new(0.5, 0.0)],
            b,
            c: vec![],
            d: vec![],
            a_block: vec![vec![C64::new(0.5, 0.0)]],
            r: 2,
            p: 2,
        }
        .validate()?;
        let report = parabolic_model_dichotomy(&form, 500, 1)?;
        println!("parabolic Im b = {}: {:?}, base dimension {}", b.im, report.tau_kind, report.base_dimension);
    }
    Ok(())
}
