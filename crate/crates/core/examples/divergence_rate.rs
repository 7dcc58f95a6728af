//! Divergence rate and hyperbolic step of a dilation.
use kobdyn::cli::verify::transported_dilation;
use kobdyn::invariants::{divergence_rate, hyperbolic_step, RateConfig, StepConfig};
use kobdyn::linalg::{CVector, C64};

fn main() -> kobdyn::Result<()> {
    let x = CVector::from_vec(vec![C64::new(0.2, 0.1), C64::new(0.0, -0.3)]);
    for lambda in [1.5, 2.0, 4.0] {
        let f = transported_dilation(lambda, 2)?;
        let est = divergence_rate(&f, &x, &RateConfig { max_m: 2000, tol: 1e-8 })?;
        let step = hyperbolic_step(&f, &x, 1, &StepConfig::default())?;
        println!(
            "lambda {lambda}: c = {:.10} (ln lambda = {:.10}), bracket [{:.3e}, {:.3e}], s_1 = {:.10}",
            est.c,
            lambda.ln(),
            est.bracket.0,
            est.bracket.1,
            step.limit
        );
    }
    Ok(())
}
