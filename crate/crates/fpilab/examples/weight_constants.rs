//! Muckenhoupt constants of the weight catalog and the A_p characterization
//! inequalities (which are exact finite-sum statements on the lattice).
//!
//! Run with: `cargo run --release --example weight_constants`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::weights::{
    a1_constant, ap_constant, check_ap_function_inequality, parse_weight,
};

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(1)?, 64)?;
    for spec in [
        "constant:c=1",
        "step:axis=0,t=0.5,lo=1,hi=2",
        "power:a=0.5,center=0",
        "prod:(constant:c=2)*(step:axis=0,t=0.25,lo=1,hi=4)",
    ] {
        let w = parse_weight(spec)?;
        let a1 = a1_constant(&w, &grid)?;
        print!("[w]_A1 = {:.6}", a1.constant);
        for p in [1.5, 2.0, 4.0] {
            print!("  [w]_A{p} = {:.6}", ap_constant(&w, p, &grid)?.constant);
        }
        println!("  <- {spec}");
        println!(
            "    maximizer: corner {:?}, side {:.4}",
            a1.argmax.corner(),
            a1.argmax.side()
        );
    }

    // The function characterization has core ratio <= 1 up to roundoff.
    let w = parse_weight("step:axis=0,t=0.5,lo=1,hi=2")?;
    let u = parse_func("gauss")?.sample(&grid)?;
    let rho = check_ap_function_inequality(&w, 2.0, &u, grid.cube())?;
    println!("A_p function characterization core ratio: {rho:.12} (<= 1)");
    Ok(())
}
