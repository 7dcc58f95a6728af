//! Kobayashi distances on the ball and the Siegel half-space, and the
//! Cayley transform between them.
use kobdyn::ball_geometry::{cayley, kobayashi_distance, siegel_kobayashi_distance, BallPoint};
use kobdyn::linalg::C64;

fn main() -> kobdyn::Result<()> {
    let z = BallPoint::from_slice(&[C64::new(0.3, 0.1), C64::new(-0.2, 0.4)])?;
    let w = BallPoint::from_slice(&[C64::new(-0.5, 0.0), C64::new(0.1, -0.6)])?;
    let k_ball = kobayashi_distance(&z, &w)?;
    let k_siegel = siegel_kobayashi_distance(&cayley(&z)?, &cayley(&w)?)?;
    println!("k_B(z, w)         = {k_ball:.15}");
    println!("k_H(Cz, Cw)       = {k_siegel:.15}");
    println!("|difference|      = {:.3e}", (k_ball - k_siegel).abs());

    let origin = BallPoint::origin(2);
    for r in [0.5, 0.9, 0.99, 0.999] {
        let p = BallPoint::from_slice(&[C64::new(r, 0.0), C64::new(0.0, 0.0)])?;
        // Radial distance is 2 atanh(r) in this normalization.
        println!("k(0, {r}) = {:.12}  2 atanh = {:.12}", kobayashi_distance(&origin, &p)?, 2.0 * r.atanh());
    }
    Ok(())
}
