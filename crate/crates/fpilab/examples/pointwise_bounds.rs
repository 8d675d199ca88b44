//! Pointwise oscillation bounds: |u(x)-u(y)| against maximal functions of
//! the gradient (local fractional and min/max forms) and |u(x)-u_Q| against
//! a Riesz potential.
//!
//! Run with: `cargo run --release --example pointwise_bounds`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{gradient_magnitude, make_grid, Cube};
use fpilab::seminorm::{representation_check, ReprLemma, SeminormParams};

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(2)?, 32)?;
    let u = parse_func("gauss")?.sample(&grid)?;
    let g = gradient_magnitude(&u)?;

    let delta = 0.5;
    let params = SeminormParams {
        p: 1.0,
        delta,
        beta: delta,
        alpha: 1.0,
        r: 1.0,
        eta: 0.25,
        kappa: 1.0,
    };

    for (name, lemma) in [
        ("fractional maximal pair bound ", ReprLemma::L43),
        ("Riesz potential mean bound    ", ReprLemma::L44),
        ("min/max maximal pair bound    ", ReprLemma::L45),
    ] {
        let rep = representation_check(lemma, &u, &g, params, grid.cube(), None)?;
        println!(
            "{name}: max ratio {:.5} over {} pairs (argmax {:?})",
            rep.max_ratio, rep.pairs_checked, rep.argmax
        );
    }

    // The affine case saturates the min/max bound at exactly 1.
    let affine = parse_func("linear")?.sample(&grid)?;
    let ga = gradient_magnitude(&affine)?;
    let rep = representation_check(ReprLemma::L45, &affine, &ga, params, grid.cube(), None)?;
    println!("affine saturation (L45):        max ratio {:.12}", rep.max_ratio);
    Ok(())
}
