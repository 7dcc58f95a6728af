//! Solves the Valiron and Abel equations for a hyperbolic form.
use kobdyn::functional_equations::{abel_solve, valiron_solve, ValironConfig};
use kobdyn::lft_models::{HyperbolicLftForm, UpperBoundPolicy};
use kobdyn::linalg::{CVector, C64};

fn main() -> kobdyn::Result<()> {
    let form = HyperbolicLftForm { lambda: 3.0, b: C64::new(0.0, 0.5), d: vec![], a: vec![], c: vec![], p: 1 }
        .validate(UpperBoundPolicy::Enforce)?;
    let g = form.to_self_map()?;
    let samples: Vec<CVector> =
        (1..=20).map(|k| CVector::from_vec(vec![C64::new(0.1 * k as f64 - 1.0, 0.2 * k as f64)])).collect();
    let valiron = valiron_solve(&g, 1.0 / 3.0, &samples, &ValironConfig::default())?;
    println!("Valiron residual {:.3e}", valiron.residual_sup);
    let z = CVector::from_vec(vec![C64::new(0.0, 1.0)]);
    // For this form Θ(z) = z + b/(λ − 1).
    println!("Theta(i) = {}  expected {}", valiron.theta(&z)?, C64::new(0.0, 1.25));
    let abel = abel_solve(&g, &valiron, &samples)?;
    println!("Abel residual {:.3e}, strip height {:.6}", abel.residual_sup, abel.summary().strip_height);
    Ok(())
}
