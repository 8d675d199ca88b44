//! Gagliardo and Sobolev seminorms, mean oscillation, and the 1-D identity
//! where the kernel cancels exactly.
//!
//! Run with: `cargo run --release --example seminorms`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::seminorm::{gagliardo_seminorm, poincare_oscillation, sobolev_seminorm};
use fpilab::weights::{MeasureSpec, WeightSpec};

fn main() -> fpilab::Result<()> {
    // u(x) = x on [0,1] with p = 2, delta = 1/2: the integrand is exactly 1,
    // so the diagonal-excluded double sum equals (N-1)/N.
    let grid = make_grid(Cube::unit(1)?, 64)?;
    let u = parse_func("linear")?.sample(&grid)?;
    let g = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), grid.cube(), 0)?;
    println!("1-D kernel cancellation: {g:.10} (exact sqrt(63/64) = {:.10})", (63.0f64 / 64.0).sqrt());

    // The same seminorms for a smooth bump in 2-D, weighted and unweighted.
    let grid2 = make_grid(Cube::unit(2)?, 32)?;
    let bump = parse_func("bump")?.sample(&grid2)?;
    let w = WeightSpec::Power { a: 0.5, center: vec![0.0, 0.0] };
    for delta in [0.3, 0.6, 0.9] {
        let unweighted =
            gagliardo_seminorm(&bump, 2.0, delta, &MeasureSpec::lebesgue(), grid2.cube(), 0)?;
        let weighted =
            gagliardo_seminorm(&bump, 2.0, delta, &MeasureSpec::from_weight(w.clone()), grid2.cube(), 0)?;
        println!("delta = {delta}: gagliardo = {unweighted:.5} (weighted {weighted:.5})");
    }
    let s = sobolev_seminorm(&bump, 2.0, &w, grid2.cube())?;
    println!("weighted sobolev seminorm: {s:.5}");
    println!("mean oscillation:          {:.5}", poincare_oscillation(&bump, grid2.cube())?);

    // Near-diagonal correction tightens the diagonal-excluded sum from below.
    let v0 = gagliardo_seminorm(&bump, 2.0, 0.6, &MeasureSpec::lebesgue(), grid2.cube(), 0)?;
    let v2 = gagliardo_seminorm(&bump, 2.0, 0.6, &MeasureSpec::lebesgue(), grid2.cube(), 2)?;
    println!("diagonal_depth 0 -> 2: {v0:.6} -> {v2:.6}");
    Ok(())
}
