//! Valiron (`Θ∘f = Θ/λ_f`) and Abel (`θ∘f = θ + 1`) equations for
//! hyperbolic maps, solved with the normalized-iterate estimator
//! `Θ(z) = lim λ_f^n (f^n z)_1` in Siegel coordinates.

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{cayley_raw, Domain};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CVector, C64};
use crate::self_maps::{SelfMap, COORDINATE_LIMIT};
use crate::semigroups::Semigroup;

/// Siegel form of a hyperbolic map: either a Siegel map, or a ball map
/// obtained from one by Cayley transport.
fn siegel_core(f: &SelfMap) -> Result<(SelfMap, bool)> {
    match f.domain() {
        Domain::Siegel => Ok((f.clone(), false)),
        Domain::Ball => {
            if let crate::self_maps::MapKind::Conjugated { chart: crate::self_maps::Chart::CayleyInverse, inner } =
                f.kind()
            {
                if inner.domain() == Domain::Siegel {
                    return Ok(((**inner).clone(), true));
                }
            }
            Err(Error::PreconditionFailed(
                "Valiron solver needs Siegel coordinates with the Denjoy-Wolff point at infinity".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValironConfig {
    pub cap: usize,
    /// Relative Cauchy-gap threshold.
    pub tol: f64,
}

impl Default for ValironConfig {
    fn default() -> Self {
        ValironConfig { cap: 400, tol: 1e-15 }
    }
}

/// Estimated `Θ` with residual certificate.
#[derive(Debug, Clone)]
pub struct ValironSolution {
    map: SelfMap,
    ball_input: bool,
    pub lambda_f: f64,
    pub config: ValironConfig,
    /// `sup |Θ(f z) − Θ(z)/λ_f|` over the sample set.
    pub residual_sup: f64,
    /// Per-sample Cauchy gaps `|Θ_n − Θ_{n−1}|`.
    pub convergence_trace: Vec<Vec<f64>>,
    /// The filling property of `Θ` is not checked.
    pub filling: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValironSummary {
    pub lambda_f: f64,
    pub residual_sup: f64,
    pub samples: usize,
    pub max_iterations: usize,
    pub filling: String,
}

impl ValironSolution {
    /// `Θ` at a point of the domain of the input map.
    pub fn theta(&self, z: &CVector) -> Result<C64> {
        Ok(self.theta_traced(z)?.0)
    }

    fn to_siegel(&self, z: &CVector) -> CVector {
        if self.ball_input {
            cayley_raw(z)
        } else {
            z.clone()
        }
    }

    fn theta_traced(&self, z: &CVector) -> Result<(C64, Vec<f64>)> {
        let mut y = self.to_siegel(z);
        if !Domain::Siegel.contains(&y) {
            return Err(Error::OutsideDomain("Valiron argument".into()));
        }
        let mut scale = 1.0;
        let mut estimate = y[0];
        let mut gaps = Vec::new();
        for _ in 0..self.config.cap {
            y = self.map.eval(&y);
            scale *= self.lambda_f;
            if max_abs(&y) > COORDINATE_LIMIT || scale == 0.0 {
                break;
            }
            let next = y[0] * scale;
            let gap = (next - estimate).norm();
            gaps.push(gap);
            estimate = next;
            if gap <= self.config.tol * estimate.norm().max(1.0) {
                return Ok((estimate, gaps));
            }
        }
        Err(Error::NotConverged {
            what: "Valiron estimator",
            detail: format!("Cauchy gap {:e} after {} steps", gaps.last().copied().unwrap_or(f64::NAN), gaps.len()),
        })
    }

    pub fn summary(&self) -> ValironSummary {
        ValironSummary {
            lambda_f: self.lambda_f,
            residual_sup: self.residual_sup,
            samples: self.convergence_trace.len(),
            max_iterations: self.convergence_trace.iter().map(Vec::len).max().unwrap_or(0),
            filling: self.filling.to_string(),
        }
    }
}

/// Solves `Θ∘f = Θ/λ_f` and certifies the residual on `samples`.
pub fn valiron_solve(f: &SelfMap, lambda_f: f64, samples: &[CVector], config: &ValironConfig) -> Result<ValironSolution> {
    if !(lambda_f > 0.0 && lambda_f < 1.0 - 1e-12) {
        return Err(Error::PreconditionFailed(format!("Valiron equation needs a hyperbolic map (dilation {lambda_f})")));
    }
    let (map, ball_input) = siegel_core(f)?;
    let mut sol = ValironSolution {
        map,
        ball_input,
        lambda_f,
        config: *config,
        residual_sup: 0.0,
        convergence_trace: Vec::with_capacity(samples.len()),
        filling: "not certified",
    };
    let mut residual: f64 = 0.0;
    for z in samples {
        let (theta, gaps) = sol.theta_traced(z)?;
        if theta.im <= 0.0 {
            return Err(Error::ConsistencyFailure(format!("Im Θ = {} is not positive", theta.im)));
        }
        let image = f.eval(z);
        let theta_image = sol.theta(&image)?;
        residual = residual.max((theta_image - theta / lambda_f).norm());
        sol.convergence_trace.push(gaps);
    }
    sol.residual_sup = residual;
    Ok(sol)
}

/// `θ = log Θ / log(1/λ_f)`, principal branch.
#[derive(Debug, Clone)]
pub struct AbelSolution {
    valiron: ValironSolution,
    pub residual_sup: f64,
    /// The shipped construction lands in a strip, not onto `H`.
    pub surjective: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelSummary {
    pub log_base: f64,
    pub residual_sup: f64,
    pub strip_height: f64,
    pub surjective: bool,
}

impl AbelSolution {
    pub fn theta_abel(&self, z: &CVector) -> Result<C64> {
        Ok(self.valiron.theta(z)?.ln() / self.log_base())
    }

    pub fn log_base(&self) -> f64 {
        (1.0 / self.valiron.lambda_f).ln()
    }

    pub fn summary(&self) -> AbelSummary {
        AbelSummary {
            log_base: self.log_base(),
            residual_sup: self.residual_sup,
            strip_height: std::f64::consts::PI / self.log_base(),
            surjective: self.surjective,
        }
    }
}

/// Solves `θ∘f = θ + 1` from a Valiron solution.
pub fn abel_solve(f: &SelfMap, valiron: &ValironSolution, samples: &[CVector]) -> Result<AbelSolution> {
    let mut sol = AbelSolution { valiron: valiron.clone(), residual_sup: 0.0, surjective: false };
    let mut residual: f64 = 0.0;
    for z in samples {
        let lhs = sol.theta_abel(&f.eval(z))?;
        let rhs = sol.theta_abel(z)? + 1.0;
        residual = residual.max((lhs - rhs).norm());
    }
    sol.residual_sup = residual;
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupValironReport {
    /// `λ = −log λ_{φ_1}`.
    pub exponent: f64,
    pub times: Vec<f64>,
    /// `sup |Θ(φ_t z) − e^{λt}Θ(z)|` per time.
    pub residuals: Vec<f64>,
}

/// One `Θ` from `φ_1`, checked against `Θ∘φ_t = e^{λt}Θ`.
pub fn semigroup_valiron(
    phi: &Semigroup,
    exponent: f64,
    t_grid: &[f64],
    samples: &[CVector],
    config: &ValironConfig,
) -> Result<SemigroupValironReport> {
    if !(exponent > 0.0) {
        return Err(Error::PreconditionFailed("semigroup is not hyperbolic".into()));
    }
    let phi1 = phi.at(1.0)?;
    let sol = valiron_solve(&phi1, (-exponent).exp(), samples, config)?;
    let mut residuals = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut worst: f64 = 0.0;
        for z in samples {
            let lhs = sol.theta(&phi.evaluate(t, z)?)?;
            let rhs = sol.theta(z)? * (exponent * t).exp();
            worst = worst.max((lhs - rhs).norm());
        }
        residuals.push(worst);
    }
    Ok(SemigroupValironReport { exponent, times: t_grid.to_vec(), residuals })
}

/// `|Θ(z_k)|` along a sequence tending to the Denjoy–Wolff point, and
/// whether its last `tail` terms increase.
pub fn valiron_growth(sol: &ValironSolution, seq: &[CVector], tail: usize) -> Result<(Vec<f64>, bool)> {
    let values = seq.iter().map(|z| Ok(sol.theta(z)?.norm())).collect::<Result<Vec<_>>>()?;
    let start = values.len().saturating_sub(tail);
    let increasing = values[start..].windows(2).all(|w| w[1] > w[0]);
    Ok((values, increasing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cvec, CMatrix, I};
    use crate::sampling;
    use crate::semigroups::AffineSiegelFlow;

    fn affine(diag: &[C64], shift: &[C64]) -> SelfMap {
        SelfMap::affine(Domain::Siegel, CMatrix::from_diagonal(&cvec(diag)), cvec(shift)).unwrap()
    }

    fn samples(q: usize, n: usize, seed: u64) -> Vec<CVector> {
        let mut rng = sampling::rng(seed);
        (0..n).map(|_| sampling::siegel_point(&mut rng, q)).collect()
    }

    #[test]
    fn valiron_examples() {
        let g = affine(&[c(2.0, 0.0)], &[c(0.0, 0.5)]);
        let pts = samples(1, 200, 1);
        let sol = valiron_solve(&g, 0.5, &pts, &ValironConfig::default()).unwrap();
        assert!(sol.residual_sup < 1e-12);
        for z in &pts {
            assert!((sol.theta(z).unwrap() - (z[0] + c(0.0, 0.5))).norm() < 1e-10);
        }

        let g = affine(&[c(2.0, 0.0), c(2f64.sqrt(), 0.0)], &[c(0.0, 0.0); 2]);
        let pts = samples(2, 100, 2);
        let sol = valiron_solve(&g, 0.5, &pts, &ValironConfig::default()).unwrap();
        assert_eq!(sol.residual_sup, 0.0);
        assert_eq!(sol.theta(&pts[0]).unwrap(), pts[0][0]);

        let tr = affine(&[c(1.0, 0.0)], &[c(1.0, 0.0)]);
        assert!(matches!(valiron_solve(&tr, 1.0, &pts[..1], &ValironConfig::default()), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn abel_examples() {
        let g = affine(&[c(2.0, 0.0)], &[c(0.0, 0.0)]);
        let pts = samples(1, 1000, 3);
        let val = valiron_solve(&g, 0.5, &pts, &ValironConfig::default()).unwrap();
        let abel = abel_solve(&g, &val, &pts).unwrap();
        assert!(abel.residual_sup < 1e-12);
        let at_i = abel.theta_abel(&cvec(&[I])).unwrap();
        let expected = c(0.0, std::f64::consts::PI / (2.0 * 2f64.ln()));
        assert!((at_i - expected).norm() < 1e-15);
        assert!(!abel.surjective);
    }

    #[test]
    fn transported_input_and_growth() {
        let g = SelfMap::cayley_transport(affine(&[c(4.0, 0.0)], &[I])).unwrap();
        let mut rng = sampling::rng(5);
        let pts: Vec<CVector> = (0..100).map(|_| sampling::ball_point(&mut rng, 1, 0.9)).collect();
        let sol = valiron_solve(&g, 0.25, &pts, &ValironConfig::default()).unwrap();
        assert!(sol.residual_sup < 1e-10);
        let seq = sampling::koranyi_sequence(&mut rng, &cvec(&[c(1.0, 0.0)]), 30);
        let (_, increasing) = valiron_growth(&sol, &seq, 10).unwrap();
        assert!(increasing);
    }

    #[test]
    fn semigroup_valiron_examples() {
        let pts = samples(2, 50, 6);
        let phi = Semigroup::affine_siegel(AffineSiegelFlow {
            rate: 1.0,
            drift: c(0.0, 0.0),
            rotations: vec![0.0],
            v_exponents: vec![],
        })
        .unwrap();
        let rep = semigroup_valiron(&phi, 1.0, &[0.5, 1.0, 2.0], &pts, &ValironConfig::default()).unwrap();
        assert!(rep.residuals.iter().all(|r| *r < 1e-10));
        let drift = Semigroup::affine_siegel(AffineSiegelFlow {
            rate: 1.0,
            drift: c(0.5, 0.3),
            rotations: vec![0.4],
            v_exponents: vec![],
        })
        .unwrap();
        let rep = semigroup_valiron(&drift, 1.0, &[0.5, 1.0, 2.0], &pts, &ValironConfig::default()).unwrap();
        assert!(rep.residuals.iter().all(|r| *r < 1e-10), "{:?}", rep.residuals);
    }
}
