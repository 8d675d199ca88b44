//! Track the delta -> 1 blow-up: sweep the unweighted Gagliardo/Sobolev
//! comparison across delta with the alpha(delta, p) normalization and print
//! the per-cell spread. A small spread means the normalization captures the
//! growth of the ratio.
//!
//! Run with: `cargo run --release --example delta_sweep`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::verify::{sweep, InequalityId, VerifyParams};
use fpilab::weights::WeightSpec;

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(1)?, 64)?;
    let deltas: Vec<f64> = (0..10).map(|i| 0.50 + 0.05 * i as f64).collect();
    let funcs = [parse_func("gauss")?, parse_func("oscillatory")?];
    let table = sweep(
        &[InequalityId::L61],
        &deltas,
        &[1.0, 2.0],
        &[WeightSpec::Constant { c: 1.0 }],
        &funcs,
        &[],
        &VerifyParams::default(),
        &grid,
    )?;

    println!("delta      p=1 gauss   p=2 gauss   p=1 osc     p=2 osc");
    for &d in &deltas {
        print!("{d:.2}    ");
        for f in &funcs {
            for p in [1.0, 2.0] {
                let row = table
                    .rows
                    .iter()
                    .find(|r| r.delta == d && r.p == p && r.func_id == f.id())
                    .unwrap();
                print!("  {:.6}", row.ratio);
            }
        }
        println!();
    }
    for f in &funcs {
        for p in [1.0, 2.0] {
            let cell: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.p == p && r.func_id == f.id())
                .map(|r| r.ratio)
                .collect();
            let max = cell.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = cell.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("cell (p={p}, {}): spread = {:.3}", f.name(), max / min);
        }
    }
    Ok(())
}
