//! The four maximal variants on a density-plus-atoms measure, the
//! bit-identical brute-force oracle, and the pointwise dominations.
//!
//! Run with: `cargo run --release --example maximal_operators`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::maximal::{
    maximal_function, maximal_function_oracle, MaximalInput, MaximalSpec, MaximalVariant,
};
use fpilab::weights::{Atom, MeasureSpec, WeightSpec};

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(2)?, 16)?;
    let mu = MeasureSpec::new(
        Some(WeightSpec::Step { axis: 0, t: 0.5, lo: 1.0, hi: 2.0 }),
        vec![Atom { point: vec![0.25, 0.75], mass: 0.5 }],
    )?;

    let centered = MaximalSpec::new(
        MaximalVariant::Centered,
        0.0,
        MaximalInput::Measure(mu.clone()),
    );
    let noncentered = MaximalSpec::new(
        MaximalVariant::Noncentered,
        0.0,
        MaximalInput::Measure(mu.clone()),
    );
    let mc = maximal_function(&centered, &grid)?;
    let m = maximal_function(&noncentered, &grid)?;

    // Fast summed-area path == direct enumeration, bit for bit.
    let oracle = maximal_function_oracle(&noncentered, &grid)?;
    let identical = m
        .values()
        .iter()
        .zip(oracle.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("fast path == oracle (bitwise): {identical}");

    // Centered never exceeds non-centered.
    let dominated = mc.values().iter().zip(m.values()).all(|(c, n)| c <= n);
    println!("M^c <= M node-wise:            {dominated}");

    let peak = m.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("max node value of M(mu):       {peak:.6}");

    // Weighted-centered maximal of a sampled function.
    let u = parse_func("oscillatory")?.sample(&grid)?;
    let weighted = MaximalSpec::new(
        MaximalVariant::WeightedCentered(WeightSpec::Constant { c: 1.0 }),
        0.0,
        MaximalInput::Field(u.clone()),
    );
    let mw = maximal_function(&weighted, &grid)?;
    let ok = mw
        .values()
        .iter()
        .zip(u.values())
        .all(|(m, u)| *m >= u.abs() - 1e-15);
    println!("M^c_w u >= |u| node-wise:      {ok}");
    Ok(())
}
