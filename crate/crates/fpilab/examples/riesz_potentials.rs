//! Riesz potentials against closed forms, and the pointwise
//! Riesz-vs-maximal bounds with their alpha-normalized core ratios.
//!
//! Run with: `cargo run --release --example riesz_potentials`

use fpilab::lattice::{make_grid, Cube};
use fpilab::maximal::{check_hedberg, riesz_potential, HedbergBound};
use fpilab::weights::{Atom, MeasureSpec, WeightSpec};

fn main() -> fpilab::Result<()> {
    // 1-D: I_{1/2}(chi_[0,1])(x) = 2(sqrt(x) + sqrt(1-x)).
    let grid = make_grid(Cube::unit(1)?, 64)?;
    let mu = MeasureSpec::lebesgue();
    let node = 0;
    let x = grid.node_position(node)[0];
    let got = riesz_potential(&mu, 0.5, node, &grid, grid.cube())?;
    let exact = 2.0 * (x.sqrt() + (1.0 - x).sqrt());
    println!("I_0.5 at first node: {got:.6} (analytic {exact:.6}, err {:.3}%)", (got - exact).abs() / exact * 100.0);

    // A single atom reproduces the kernel exactly.
    let atom = MeasureSpec::new(None, vec![Atom { point: vec![0.5], mass: 1.0 }])?;
    let got = riesz_potential(&atom, 0.5, 0, &grid, grid.cube())?;
    println!("single atom kernel: {got:.6} (= |x - 1/2|^(-1/2) = {:.6})", (x - 0.5f64).abs().powf(-0.5));

    // Pointwise bounds in 2-D: max over nodes of alpha * I / core.
    let grid2 = make_grid(Cube::unit(2)?, 32)?;
    let w = MeasureSpec::from_weight(WeightSpec::Step { axis: 0, t: 0.5, lo: 1.0, hi: 2.0 });
    for (name, bound) in [
        ("I vs M^c (global)   ", HedbergBound::LemEq1),
        ("I vs l^a M (on Q0)  ", HedbergBound::LemEq2),
        ("I vs A_1 weight data", HedbergBound::LemEq3),
    ] {
        let rep = check_hedberg(bound, &w, 0.5, grid2.cube(), &grid2)?;
        println!("{name}: max alpha*I/core = {:.5} at node {}", rep.max_ratio, rep.argmax);
    }
    Ok(())
}
