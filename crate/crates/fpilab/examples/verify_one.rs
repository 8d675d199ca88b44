//! Verify a single weighted inequality instance and print the report CSV:
//! LHS, RHS-core, the explicit parameter factor K, and the core ratio
//! rho = LHS / (K * RHS-core) that the dimensional constant would bound.
//!
//! Run with: `cargo run --release --example verify_one`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::verify::{reports_to_csv, verify_inequality, InequalityId, VerifyParams};
use fpilab::weights::parse_weight;

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(2)?, 32)?;
    let func = parse_func("gauss")?;
    let weight = parse_weight("power:a=0.5,center=0,0")?;
    let params = VerifyParams::default();

    let mut rows = Vec::new();
    for (id, p) in [
        (InequalityId::T21, 2.0),
        (InequalityId::T22, 1.0),
        (InequalityId::T23, 1.0),
        (InequalityId::E51, 2.0),
    ] {
        rows.push(verify_inequality(id, &func, &weight, &[], p, 0.6, &params, &grid)?);
    }
    print!("{}", reports_to_csv(&rows, &[]));

    for r in &rows {
        println!(
            "# {}: rho = {:.5}  (lhs {:.5}, K {:.5}, rhs {:.5}, [w] {:.4})",
            r.id, r.ratio, r.lhs, r.k_factor, r.rhs_core, r.a1_est
        );
    }
    Ok(())
}
