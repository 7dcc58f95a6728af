//! Seeded samplers. Every sampler takes the generator explicitly so that
//! results depend only on the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, unitary_from_e1, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector(rng: &mut SeededRng, q: usize) -> CVector {
    CVector::from_fn(q, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Uniform point of the ball of radius `radius` in `C^q`.
pub fn ball_point(rng: &mut SeededRng, q: usize, radius: f64) -> CVector {
    let g = gaussian_vector(rng, q);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / (2.0 * q as f64));
    let scale = r / g.norm();
    g * C64::new(scale, 0.0)
}

/// Point of `H^q` with `Im z_1 − ‖w‖²` log-uniform in `[e^{-2}, e^{2}]`.
pub fn siegel_point(rng: &mut SeededRng, q: usize) -> CVector {
    let mut p = CVector::zeros(q);
    for k in 1..q {
        p[k] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let tail: f64 = p.iter().skip(1).map(|x| x.norm_sqr()).sum();
    let excess = rng.random_range(-2.0f64..2.0).exp();
    p[0] = C64::new(rng.random_range(-3.0..3.0), tail + excess);
    p
}

/// A unit vector orthogonal to `a` (zero when `q = 1`).
fn transverse_direction(rng: &mut SeededRng, a: &CVector) -> CVector {
    let q = a.len();
    if q == 1 {
        return CVector::zeros(1);
    }
    let g = gaussian_vector(rng, q);
    let v = &g - a * inner(&g, a);
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Sequence converging to `a` inside a Korányi region: `1 − ⟨z_k, a⟩` has
/// a fixed random phase in a cone around the real axis and a transverse
/// component of size `O(sqrt(1 − |⟨z_k,a⟩|))`.
pub fn koranyi_sequence(rng: &mut SeededRng, a: &CVector, len: usize) -> Vec<CVector> {
    let slope: f64 = rng.random_range(-0.5..0.5);
    let beta: f64 = rng.random_range(0.0..0.3);
    let t0: f64 = rng.random_range(0.2..0.5);
    let v = transverse_direction(rng, a);
    (0..len)
        .map(|k| {
            let t = t0 * 0.5f64.powi(k as i32);
            let zeta = C64::new(1.0 - t, -t * slope);
            a * zeta + &v * C64::new(beta * t.sqrt(), 0.0)
        })
        .collect()
}

/// Admissible sequence at `a` whose phase `(1 − ⟨z_k,a⟩)/|1 − ⟨z_k,a⟩|`
/// is constant, equal to `(1 + i·slope)/sqrt(1 + slope²)`; the transverse
/// component is `O(t_k)` so the sequence is special.
pub fn admissible_sequence(a: &CVector, slope: f64, transverse: f64, len: usize) -> Vec<CVector> {
    let q = a.len();
    let u = unitary_from_e1(a);
    (0..len)
        .map(|k| {
            let t = 0.25 * 0.5f64.powi(k as i32);
            let mut z = CVector::zeros(q);
            z[0] = C64::new(1.0 - t, -t * slope);
            if q > 1 {
                z[1] = C64::new(transverse * t, 0.0);
            }
            &u * z
        })
        .collect()
}
