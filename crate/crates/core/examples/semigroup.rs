//! An affine flow on the Siegel half-space: semigroup law, rate linearity
//! and classification of its time slices.
use kobdyn::invariants::RateConfig;
use kobdyn::linalg::{CVector, C64};
use kobdyn::self_maps::DenjoyWolffConfig;
use kobdyn::semigroups::{
    classify_semigroup, rate_linearity_check, semigroup_rate, AffineSiegelFlow, Semigroup, SemigroupRateConfig,
};

fn main() -> kobdyn::Result<()> {
    let phi = Semigroup::affine_siegel(AffineSiegelFlow {
        rate: 0.8,
        drift: C64::new(0.3, 0.0),
        rotations: vec![0.5],
        v_exponents: vec![],
    })?;
    let law = phi.law_residual(200, 3)?;
    println!("law residual {:.3e}, identity residual {:.3e}", law.law_residual, law.identity_residual);

    let x = CVector::from_vec(vec![C64::new(0.0, 2.0), C64::new(0.3, 0.0)]);
    let rate = semigroup_rate(&phi, &x, &SemigroupRateConfig::default())?;
    println!("continuous rate {:.10}, bracket {:?}", rate.c, rate.bracket);

    let lin = rate_linearity_check(&phi, &x, &[0.5, 1.0, 2.0], &RateConfig { max_m: 2000, tol: 1e-8 })?;
    println!("c(phi_1) = {:.10}, slope {:.10}, max deviation {:.3e}", lin.c1, lin.slope, lin.max_deviation);

    let class = classify_semigroup(&phi, &DenjoyWolffConfig::default())?;
    println!("class {:?}, exponent {:?}, consistent {}", class.class, class.exponent, class.consistent);
    Ok(())
}
