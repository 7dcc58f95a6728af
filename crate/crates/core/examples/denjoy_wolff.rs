//! Classifies a transported dilation and a parabolic translation from their
//! orbits, then checks Julia's lemma on sampled horospheres.
use kobdyn::ball_geometry::Domain;
use kobdyn::cli::verify::{transported_dilation, transported_translation};
use kobdyn::linalg::C64;
use kobdyn::self_maps::{denjoy_wolff, julia_check, DenjoyWolffConfig};

fn main() -> kobdyn::Result<()> {
    let cfg = DenjoyWolffConfig::default();
    for (name, f) in [
        ("dilation 3", transported_dilation(3.0, 2)?),
        ("translation 1", transported_translation(C64::new(1.0, 0.0))?),
    ] {
        let seed = Domain::Ball.base_point(f.dim());
        let dw = denjoy_wolff(&f, &seed, &cfg)?;
        println!("{name}: class {:?}, dilation {:?}", dw.class, dw.dilation);
        if let Some(p) = &dw.point {
            println!("  point {:?}", p.coords().iter().map(|c| (c.re, c.im)).collect::<Vec<_>>());
        }
        let julia = julia_check(&f, &dw, &[0.25, 1.0, 4.0], 300, 7)?;
        println!("  Julia worst margin {:.3e}, violations {}", julia.worst_margin, julia.violations);
    }
    Ok(())
}
