//! Maximal operators and Riesz potentials.
//!
//! Four maximal variants are provided: centered, non-centered, local (cubes
//! inside a fixed `Q0`) and weighted-centered. Each comes in two
//! implementations with identical output, bit for bit:
//!
//! * the fast path, which reads window sums from an exact summed-area table;
//! * the brute-force oracle, which iterates the nodes of every candidate cube
//!   directly.
//!
//! Both paths round each window sum once from the same exact value, so the
//! equality is structural rather than accidental.
//!
//! Candidate cubes for the centered variants are `Q(x, k h)`, `k = 1..2N`:
//! their corners land on the half-grid and side `2 N h` already contains the
//! whole lattice cube from any node, so larger cubes cannot increase the
//! supremum for `alpha < n`. Centered cubes may stick out of the lattice;
//! the measure is extended by zero and the cube keeps its full volume.
//! Non-centered and local suprema run over the grid-aligned subcube family.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    align, for_each_node, AlignedCube, Cube, FieldKind, LatticeGrid, ScalarField,
};
use crate::prefix::ExactPrefixTable;
use crate::sum::WideAccumulator;
use crate::weights::{a1_constant, measure_of, Atom, MeasureSpec, WeightSpec};

/// Input measure of a maximal operator: a Borel measure, or `|u| dx` for a
/// sampled function.
#[derive(Debug, Clone)]
pub enum MaximalInput {
    Measure(MeasureSpec),
    Field(ScalarField),
}

#[derive(Debug, Clone)]
pub enum MaximalVariant {
    Centered,
    Noncentered,
    Local(Cube),
    WeightedCentered(WeightSpec),
}

#[derive(Debug, Clone)]
pub struct MaximalSpec {
    pub variant: MaximalVariant,
    pub alpha: f64,
    pub input: MaximalInput,
    /// Restrict the input to `chi_support * mu` before taking suprema.
    pub support: Option<Cube>,
}

impl MaximalSpec {
    pub fn new(variant: MaximalVariant, alpha: f64, input: MaximalInput) -> MaximalSpec {
        MaximalSpec { variant, alpha, input, support: None }
    }

    pub fn restricted(mut self, support: Cube) -> MaximalSpec {
        self.support = Some(support);
        self
    }
}

/// Node masses plus point atoms, ready for window summation.
struct Prepared {
    masses: Vec<f64>,
    atoms: Vec<Atom>,
    /// Denominator masses for the weighted-centered variant.
    den: Option<Vec<f64>>,
}

fn prepare(spec: &MaximalSpec, grid: &LatticeGrid) -> Result<Prepared> {
    let n = grid.dim();
    if !(spec.alpha >= 0.0) || spec.alpha >= n as f64 {
        return Err(Error::InvalidExponent(format!(
            "maximal exponent alpha = {} outside [0, n) for n = {n}",
            spec.alpha
        )));
    }
    let hn = grid.cell_volume();
    let (mut masses, mut atoms) = match &spec.input {
        MaximalInput::Measure(mu) => {
            let m = match &mu.density {
                Some(w) => w.sample(grid)?.values().iter().map(|v| v * hn).collect(),
                None => vec![0.0; grid.node_count()],
            };
            (m, mu.atoms.clone())
        }
        MaximalInput::Field(u) => {
            if u.grid() != grid {
                return Err(Error::Precondition("field grid does not match".into()));
            }
            (u.values().iter().map(|v| v.abs() * hn).collect(), Vec::new())
        }
    };
    let mut den = None;
    if let MaximalVariant::WeightedCentered(w) = &spec.variant {
        let wf = w.sample(grid)?;
        let u = match &spec.input {
            MaximalInput::Field(u) => u,
            MaximalInput::Measure(_) => {
                return Err(Error::Precondition(
                    "weighted-centered maximal needs a sampled function".into(),
                ))
            }
        };
        masses = u
            .values()
            .iter()
            .zip(wf.values())
            .map(|(uv, wv)| uv.abs() * wv * hn)
            .collect();
        den = Some(wf.values().iter().map(|wv| wv * hn).collect());
    }
    if let Some(support) = &spec.support {
        let window = align(grid, support)?;
        for lin in 0..masses.len() {
            let idx = grid.unravel(lin);
            if !window.contains_index(&idx, n) {
                masses[lin] = 0.0;
            }
        }
        atoms.retain(|a| window.contains_point(grid, &a.point));
    }
    Ok(Prepared { masses, atoms, den })
}

/// How window sums are computed; the two choices produce identical bits.
enum Summer<'a> {
    Prefix(ExactPrefixTable),
    Direct(&'a [f64]),
}

impl<'a> Summer<'a> {
    fn window_acc(&self, grid: &LatticeGrid, lo: &[usize; 3], hi: &[usize; 3]) -> WideAccumulator {
        match self {
            Summer::Prefix(t) => t.window_acc(lo, hi),
            Summer::Direct(masses) => {
                let n = grid.dim();
                let mut acc = WideAccumulator::new();
                let ext = |a: usize| if a < n { lo[a]..hi[a] } else { 0..1 };
                let mut idx = [0usize; 3];
                for i0 in ext(0) {
                    idx[0] = i0;
                    for i1 in ext(1) {
                        idx[1] = i1;
                        for i2 in ext(2) {
                            idx[2] = i2;
                            acc.add(masses[grid.ravel(&idx)]);
                        }
                    }
                }
                acc
            }
        }
    }
}

/// Centered cube membership for a point: `[x - kh/2, x + kh/2)` per axis.
fn centered_contains(node_pos: &[f64], k: usize, h: f64, point: &[f64]) -> bool {
    let half = 0.5 * k as f64 * h;
    node_pos.iter().zip(point).all(|(x, z)| *z >= x - half && *z < x + half)
}

/// Node-index window of the centered cube `Q(x, kh)` clamped to the lattice:
/// offsets `j` with `-floor(k/2) <= j <= ceil(k/2) - 1` per axis.
fn centered_window(idx: &[usize; 3], k: usize, n: usize, res: usize) -> ([usize; 3], [usize; 3]) {
    let jmin = -((k / 2) as isize);
    let jmax = ((k + 1) / 2) as isize - 1;
    let mut lo = [0usize; 3];
    let mut hi = [1usize; 3];
    for a in 0..n {
        lo[a] = (idx[a] as isize + jmin).max(0) as usize;
        hi[a] = ((idx[a] as isize + jmax).min(res as isize - 1)) as usize + 1;
    }
    (lo, hi)
}

fn volume_factor(k: usize, n: usize, hn: f64) -> f64 {
    (k.pow(n as u32) as f64) * hn
}

/// Shared per-candidate value: `(kh)^alpha * mu(R) / |R|`.
fn cube_value(total: f64, k: usize, n: usize, h: f64, hn: f64, alpha: f64) -> f64 {
    let avg = total / volume_factor(k, n, hn);
    if alpha == 0.0 {
        avg
    } else {
        (k as f64 * h).powf(alpha) * avg
    }
}

fn centered_pass(
    grid: &LatticeGrid,
    prep: &Prepared,
    alpha: f64,
    num: &Summer,
    den: Option<&Summer>,
) -> Vec<f64> {
    let n = grid.dim();
    let res = grid.res();
    let h = grid.spacing();
    let hn = grid.cell_volume();
    (0..grid.node_count())
        .into_par_iter()
        .map(|lin| {
            let idx = grid.unravel(lin);
            let pos: Vec<f64> = (0..n).map(|a| grid.node_coord(a, idx[a])).collect();
            let mut best = f64::NEG_INFINITY;
            for k in 1..=2 * res {
                let (lo, hi) = centered_window(&idx, k, n, res);
                let mut acc = num.window_acc(grid, &lo, &hi);
                for a in &prep.atoms {
                    if centered_contains(&pos, k, h, &a.point) {
                        acc.add(a.mass);
                    }
                }
                let total = acc.round();
                let value = match den {
                    Some(d) => {
                        let dv = d.window_acc(grid, &lo, &hi).round();
                        let base = total / dv;
                        if alpha == 0.0 {
                            base
                        } else {
                            (k as f64 * h).powf(alpha) * base
                        }
                    }
                    None => cube_value(total, k, n, h, hn, alpha),
                };
                if value > best {
                    best = value;
                }
            }
            best
        })
        .collect()
}

fn aligned_pass(
    grid: &LatticeGrid,
    prep: &Prepared,
    alpha: f64,
    region: AlignedCube,
    summer: &Summer,
) -> Vec<f64> {
    let n = grid.dim();
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let mut out = vec![f64::NEG_INFINITY; grid.node_count()];
    for cube in crate::lattice::aligned_subcubes_of(region, n) {
        let mut hi = [1usize; 3];
        for a in 0..n {
            hi[a] = cube.lo[a] + cube.k;
        }
        let mut acc = summer.window_acc(grid, &cube.lo, &hi);
        for a in &prep.atoms {
            if cube.contains_point(grid, &a.point) {
                acc.add(a.mass);
            }
        }
        let value = cube_value(acc.round(), cube.k, n, h, hn, alpha);
        for_each_node(grid, &cube, |lin, _| {
            if value > out[lin] {
                out[lin] = value;
            }
        });
    }
    // Nodes outside the region never met a cube.
    for v in &mut out {
        if *v == f64::NEG_INFINITY {
            *v = 0.0;
        }
    }
    out
}

fn run(spec: &MaximalSpec, grid: &LatticeGrid, fast: bool) -> Result<ScalarField> {
    let prep = prepare(spec, grid)?;
    let num = if fast {
        Summer::Prefix(ExactPrefixTable::build(grid.dim(), grid.res(), &prep.masses))
    } else {
        Summer::Direct(&prep.masses)
    };
    let values = match &spec.variant {
        MaximalVariant::Centered => centered_pass(grid, &prep, spec.alpha, &num, None),
        MaximalVariant::WeightedCentered(_) => {
            let den_masses = prep.den.as_ref().expect("prepared weighted denominators");
            let den = if fast {
                Summer::Prefix(ExactPrefixTable::build(grid.dim(), grid.res(), den_masses))
            } else {
                Summer::Direct(den_masses)
            };
            centered_pass(grid, &prep, spec.alpha, &num, Some(&den))
        }
        MaximalVariant::Noncentered => {
            aligned_pass(grid, &prep, spec.alpha, AlignedCube::full(grid), &num)
        }
        MaximalVariant::Local(q0) => {
            let region = align(grid, q0)?;
            aligned_pass(grid, &prep, spec.alpha, region, &num)
        }
    };
    ScalarField::new(*grid, values, FieldKind::Function)
}

/// Accelerated maximal function (summed-area window sums).
pub fn maximal_function(spec: &MaximalSpec, grid: &LatticeGrid) -> Result<ScalarField> {
    run(spec, grid, true)
}

/// Brute-force oracle: identical definition, window sums by direct node
/// iteration. Bit-identical to [`maximal_function`].
pub fn maximal_function_oracle(spec: &MaximalSpec, grid: &LatticeGrid) -> Result<ScalarField> {
    run(spec, grid, false)
}

/// `M(M(chi_Q mu))`: two passes of the non-centered fast path, the second on
/// the first pass's output taken as a density.
pub fn iterated_maximal(
    mu: &MeasureSpec,
    grid: &LatticeGrid,
    support: Option<Cube>,
) -> Result<ScalarField> {
    let mut spec = MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Measure(mu.clone()));
    spec.support = support;
    let first = maximal_function(&spec, grid)?;
    let second = MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Field(first));
    maximal_function(&second, grid)
}

/// Volume of the unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI / 3.0,
    }
}

/// `int_{[-s/2,s/2]^n} |y|^(alpha-n) dy` for the cell containing the
/// evaluation point. Closed form in 1-D; in higher dimensions the box is
/// split 4-fold per axis, off-center subcells use the midpoint rule, the
/// central box recurses (depth 3) and the remainder is replaced by the
/// equal-volume ball, whose integral is exact.
pub(crate) fn self_cell_weight(alpha: f64, s: f64, n: usize) -> f64 {
    self_cell_integral(alpha, s, n)
}

fn self_cell_integral(alpha: f64, s: f64, n: usize) -> f64 {
    if n == 1 {
        return 2.0 * (0.5 * s).powf(alpha) / alpha;
    }
    fn recurse(alpha: f64, s: f64, n: usize, depth: usize) -> f64 {
        if depth == 0 {
            let vn = unit_ball_volume(n);
            let r_eq = (s.powi(n as i32) / vn).powf(1.0 / n as f64);
            return n as f64 * vn * r_eq.powf(alpha) / alpha;
        }
        let q = s / 4.0;
        let cells = 4usize.pow(n as u32);
        let mut total = 0.0;
        for c in 0..cells {
            let mut rem = c;
            let mut central = true;
            let mut r2 = 0.0;
            for _ in 0..n {
                let i = rem % 4;
                rem /= 4;
                let mid = -0.5 * s + (i as f64 + 0.5) * q;
                central &= i == 1 || i == 2;
                r2 += mid * mid;
            }
            if !central {
                total += r2.sqrt().powf(alpha - n as f64) * q.powi(n as i32);
            }
        }
        total + recurse(alpha, s / 2.0, n, depth - 1)
    }
    recurse(alpha, s, n, 3)
}

/// Riesz potential `I_alpha(chi_Q0 mu)(x)` at one grid node.
pub fn riesz_potential(
    mu: &MeasureSpec,
    alpha: f64,
    x_lin: usize,
    grid: &LatticeGrid,
    q0: &Cube,
) -> Result<f64> {
    let field = riesz_nodes(mu, alpha, grid, q0, Some(x_lin))?;
    Ok(field[x_lin])
}

/// Riesz potential at every node of the grid.
pub fn riesz_field(mu: &MeasureSpec, alpha: f64, grid: &LatticeGrid, q0: &Cube) -> Result<Vec<f64>> {
    riesz_nodes(mu, alpha, grid, q0, None)
}

fn riesz_nodes(
    mu: &MeasureSpec,
    alpha: f64,
    grid: &LatticeGrid,
    q0: &Cube,
    only: Option<usize>,
) -> Result<Vec<f64>> {
    let n = grid.dim();
    if !(alpha > 0.0) || alpha >= n as f64 {
        return Err(Error::InvalidExponent(format!(
            "Riesz exponent alpha = {alpha} outside (0, n) for n = {n}"
        )));
    }
    let window = align(grid, q0)?;
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let density = match &mu.density {
        Some(w) => Some(w.sample(grid)?),
        None => None,
    };
    let atoms_in: Vec<&Atom> = mu
        .atoms
        .iter()
        .filter(|a| window.contains_point(grid, &a.point))
        .collect();
    let kernel_exp = alpha - n as f64;
    let self_cell = self_cell_integral(alpha, h, n);
    let nodes: Vec<usize> = match only {
        Some(lin) => vec![lin],
        None => (0..grid.node_count()).collect(),
    };
    let mut out = vec![0.0; grid.node_count()];
    let computed: Result<Vec<(usize, f64)>> = nodes
        .par_iter()
        .map(|&x_lin| {
            let xi = grid.unravel(x_lin);
            let xpos: Vec<f64> = (0..n).map(|a| grid.node_coord(a, xi[a])).collect();
            let mut sum = 0.0;
            if let Some(df) = &density {
                let vals = df.values();
                let mut acc = 0.0;
                for_each_node(grid, &window, |lin, idx| {
                    if lin == x_lin {
                        return;
                    }
                    let mut d2 = 0.0;
                    for a in 0..n {
                        let d = idx[a] as f64 - xi[a] as f64;
                        d2 += d * d;
                    }
                    let dist = d2.sqrt() * h;
                    acc += vals[lin] * dist.powf(kernel_exp) * hn;
                });
                sum += acc;
                if window.contains_index(&xi, n) {
                    sum += vals[x_lin] * self_cell;
                }
            }
            for a in &atoms_in {
                let mut d2 = 0.0;
                for ax in 0..n {
                    let d = a.point[ax] - xpos[ax];
                    d2 += d * d;
                }
                if d2 == 0.0 {
                    return Err(Error::SingularEvaluation(format!(
                        "atom sits exactly at the evaluation node {x_lin}"
                    )));
                }
                sum += a.mass * d2.sqrt().powf(kernel_exp);
            }
            Ok((x_lin, sum))
        })
        .collect();
    for (lin, v) in computed? {
        out[lin] = v;
    }
    Ok(out)
}

/// Which pointwise Riesz bound to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedbergBound {
    /// `I_a(chi mu)(x) <= (C/a) mu(Q0)^(a/n) M^c(chi mu)(x)^((n-a)/n)`, all x.
    LemEq1,
    /// `I_a(chi mu)(x) <= (C/a) l(Q0)^a M(chi mu)(x)`, x in Q0.
    LemEq2,
    /// `I_a(chi w)(x) <= (C/a) [w]^((n-a)/n) w(Q0)^(a/n) w(x)^((n-a)/n)`.
    LemEq3,
}

#[derive(Debug, Clone)]
pub struct PointwiseReport {
    /// Per-node `alpha * LHS(x) / core(x)`, zero where the bound does not apply.
    pub ratios: ScalarField,
    pub max_ratio: f64,
    pub argmax: usize,
}

/// Evaluate a pointwise Riesz-vs-maximal bound as the core-ratio field
/// `rho(x) = alpha * I_alpha(x) / core(x)` and its maximum.
pub fn check_hedberg(
    bound: HedbergBound,
    mu: &MeasureSpec,
    alpha: f64,
    q0: &Cube,
    grid: &LatticeGrid,
) -> Result<PointwiseReport> {
    let n = grid.dim();
    let mu_q0 = measure_of(mu, q0, grid)?;
    if !(mu_q0 > 0.0) {
        return Err(Error::Precondition("measure of Q0 vanishes".into()));
    }
    let riesz = riesz_field(mu, alpha, grid, q0)?;
    let window = align(grid, q0)?;
    let theta = alpha / n as f64;
    let core: Vec<f64> = match bound {
        HedbergBound::LemEq1 => {
            let spec =
                MaximalSpec::new(MaximalVariant::Centered, 0.0, MaximalInput::Measure(mu.clone()))
                    .restricted(*q0);
            let mc = maximal_function(&spec, grid)?;
            mc.values()
                .iter()
                .map(|m| mu_q0.powf(theta) * m.powf(1.0 - theta))
                .collect()
        }
        HedbergBound::LemEq2 => {
            let spec = MaximalSpec::new(
                MaximalVariant::Noncentered,
                0.0,
                MaximalInput::Measure(mu.clone()),
            )
            .restricted(*q0);
            let m = maximal_function(&spec, grid)?;
            let la = q0.side().powf(alpha);
            (0..grid.node_count())
                .map(|lin| {
                    let idx = grid.unravel(lin);
                    if window.contains_index(&idx, n) {
                        la * m.values()[lin]
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        HedbergBound::LemEq3 => {
            let w = match &mu.density {
                Some(w) if mu.atoms.is_empty() => w,
                _ => {
                    return Err(Error::Precondition(
                        "lem-eq3 needs a pure weight-density measure".into(),
                    ))
                }
            };
            let a1 = a1_constant(w, grid)?.constant;
            let wf = w.sample(grid)?;
            wf.values()
                .iter()
                .map(|wx| a1.powf(1.0 - theta) * mu_q0.powf(theta) * wx.powf(1.0 - theta))
                .collect()
        }
    };
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = 0;
    let mut ratios = vec![0.0; grid.node_count()];
    for lin in 0..grid.node_count() {
        if core[lin] == 0.0 {
            continue;
        }
        let r = alpha * riesz[lin] / core[lin];
        ratios[lin] = r;
        if r > max_ratio {
            max_ratio = r;
            argmax = lin;
        }
    }
    if !max_ratio.is_finite() {
        return Err(Error::Precondition("no applicable node".into()));
    }
    Ok(PointwiseReport {
        ratios: ScalarField::new(*grid, ratios, FieldKind::Function)?,
        max_ratio,
        argmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeffermanSteinMode {
    Weak,
    Strong,
}

/// Fefferman–Stein core ratio over the lattice cube.
///
/// Weak: `rho = ||Mu||_{L^{1,inf}(d mu)} / int |u| M mu dx`.
/// Strong (`p > 1`): `rho = ||Mu||_{L^p(d mu)} / (p' ||u||_{L^p(M mu dx)})`.
pub fn check_fefferman_stein(
    mode: FeffermanSteinMode,
    u: &ScalarField,
    mu: &MeasureSpec,
    p: f64,
    grid: &LatticeGrid,
) -> Result<f64> {
    if mode == FeffermanSteinMode::Strong && !(p > 1.0) {
        return Err(Error::InvalidExponent(format!(
            "strong Fefferman–Stein needs p > 1, got {p}"
        )));
    }
    let mu_cells = mu.cell_masses(grid)?;
    let m_u = maximal_function(
        &MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Field(u.clone())),
        grid,
    )?;
    let m_mu = maximal_function(
        &MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Measure(mu.clone())),
        grid,
    )?;
    let hn = grid.cell_volume();
    match mode {
        FeffermanSteinMode::Weak => {
            let samples: Vec<(f64, f64)> = m_u
                .values()
                .iter()
                .zip(&mu_cells)
                .filter(|(_, &m)| m > 0.0)
                .map(|(&v, &m)| (v, m))
                .collect();
            let lhs = crate::seminorm::weak_quasinorm_samples(&samples, 1.0, false)?;
            let rhs_terms: Vec<f64> = u
                .values()
                .iter()
                .zip(m_mu.values())
                .map(|(uv, mv)| uv.abs() * mv * hn)
                .collect();
            let rhs = crate::sum::pairwise_sum(&rhs_terms);
            Ok(lhs / rhs)
        }
        FeffermanSteinMode::Strong => {
            let lhs_terms: Vec<f64> = m_u
                .values()
                .iter()
                .zip(&mu_cells)
                .map(|(&v, &m)| v.powf(p) * m)
                .collect();
            let lhs = crate::sum::pairwise_sum(&lhs_terms).powf(1.0 / p);
            let rhs_terms: Vec<f64> = u
                .values()
                .iter()
                .zip(m_mu.values())
                .map(|(uv, mv)| uv.abs().powf(p) * mv * hn)
                .collect();
            let pp = p / (p - 1.0);
            let rhs = pp * crate::sum::pairwise_sum(&rhs_terms).powf(1.0 / p);
            Ok(lhs / rhs)
        }
    }
}

/// Core ratio of the local fractional maximal bound:
/// `rho = alpha * int_{Q0} M_{alpha,Q0} u w / ([w]^{1+a/n} l(Q0)^a int_{Q0} u w)`.
pub fn check_local_frac_maximal_bound(
    u: &ScalarField,
    w: &WeightSpec,
    alpha: f64,
    q0: &Cube,
    grid: &LatticeGrid,
) -> Result<f64> {
    let n = grid.dim();
    if !(alpha > 0.0) || alpha >= n as f64 {
        return Err(Error::InvalidExponent(format!(
            "local bound needs alpha in (0, n), got {alpha}; the 1/alpha factor blows up at 0"
        )));
    }
    if u.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("local maximal bound needs u >= 0".into()));
    }
    let window = align(grid, q0)?;
    let spec = MaximalSpec::new(MaximalVariant::Local(*q0), alpha, MaximalInput::Field(u.clone()));
    let m = maximal_function(&spec, grid)?;
    let wf = w.sample(grid)?;
    let a1 = a1_constant(w, grid)?.constant;
    let hn = grid.cell_volume();
    let mut lhs_terms = Vec::new();
    let mut rhs_terms = Vec::new();
    for_each_node(grid, &window, |lin, _| {
        lhs_terms.push(m.values()[lin] * wf.values()[lin] * hn);
        rhs_terms.push(u.values()[lin] * wf.values()[lin] * hn);
    });
    let lhs = crate::sum::pairwise_sum(&lhs_terms);
    let rhs = crate::sum::pairwise_sum(&rhs_terms);
    let k = a1.powf(1.0 + alpha / n as f64) * q0.side().powf(alpha);
    Ok(alpha * lhs / (k * rhs))
}

/// A_1 constant estimate of `M(g chi_Q)^{1/n'}` (Coifman–Rochberg weight).
/// Needs `n >= 2`.
pub fn check_coifman_rochberg(g: &ScalarField, q: &Cube, grid: &LatticeGrid) -> Result<f64> {
    let n = grid.dim();
    if n < 2 {
        return Err(Error::Dimension("n' = n/(n-1) needs n >= 2".into()));
    }
    if g.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("Coifman–Rochberg input must be nonnegative".into()));
    }
    if g.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("Coifman–Rochberg input vanishes identically".into()));
    }
    let spec = MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Field(g.clone()))
        .restricted(*q);
    let m = maximal_function(&spec, grid)?;
    let exponent = 1.0 - 1.0 / n as f64; // 1/n'
    let weight = m.map(FieldKind::WeightDensity, |v| v.powf(exponent))?;
    Ok(crate::weights::a1_constant_field(&weight)?.constant)
}
