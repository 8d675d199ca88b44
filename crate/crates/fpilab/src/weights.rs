//! Weight catalog, Muckenhoupt A_1/A_p constants, weighted measures and the
//! A_p characterization inequalities.
//!
//! The discrete A_p constant maximizes the defining expression over the
//! grid-aligned subcube family; the essential infimum of a weight over a cube
//! is realized as the minimum over the sampled nodes. Both choices are
//! consistent with cell-centered sampling: every catalog weight is continuous
//! except at the step interface, which cell centers never hit.

use crate::error::{Error, Result};
use crate::lattice::catalog::parse_kv;
use crate::lattice::{align, AlignedCube, Cube, FieldKind, LatticeGrid, ScalarField};
use crate::prefix::ExactPrefixTable;
use crate::sum::WideAccumulator;

/// Analytic weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `w = c`.
    Constant { c: f64 },
    /// `w(x) = |x - center|^{-a}`, `0 <= a < n`. Centers must sit on cell
    /// corners so nodes keep a distance of at least `h/2`.
    Power { a: f64, center: Vec<f64> },
    /// `w = lo` below the threshold on one axis, `hi` at or above it.
    Step { axis: usize, t: f64, lo: f64, hi: f64 },
    /// Pointwise product of two weights.
    Prod(Box<WeightSpec>, Box<WeightSpec>),
}

impl WeightSpec {
    pub fn id(&self) -> String {
        match self {
            WeightSpec::Constant { c } => format!("constant:c={c}"),
            WeightSpec::Power { a, center } => {
                let cs: Vec<String> = center.iter().map(|c| c.to_string()).collect();
                format!("power:a={a},center={}", cs.join(","))
            }
            WeightSpec::Step { axis, t, lo, hi } => format!("step:axis={axis},t={t},lo={lo},hi={hi}"),
            WeightSpec::Prod(a, b) => format!("prod:({})*({})", a.id(), b.id()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightSpec::Constant { c } => *c,
            WeightSpec::Power { a, center } => {
                let r2: f64 = x.iter().zip(center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                r2.sqrt().powf(-a)
            }
            WeightSpec::Step { axis, t, lo, hi } => {
                if x[*axis] < *t {
                    *lo
                } else {
                    *hi
                }
            }
            WeightSpec::Prod(a, b) => a.eval(x) * b.eval(x),
        }
    }

    /// Resolve defaults against a dimension and validate parameter ranges.
    pub fn normalize(&self, dim: usize) -> Result<WeightSpec> {
        match self {
            WeightSpec::Constant { c } => {
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::NotAWeight(format!("constant {c} must be positive")));
                }
                Ok(self.clone())
            }
            WeightSpec::Power { a, center } => {
                if !(*a >= 0.0) || *a >= dim as f64 {
                    return Err(Error::NotAWeight(format!(
                        "power exponent a={a} outside [0, n) for n={dim} (local integrability)"
                    )));
                }
                let mut c = center.clone();
                if c.is_empty() {
                    c = vec![0.0; dim];
                }
                if c.len() != dim {
                    return Err(Error::NotAWeight(format!(
                        "power center has {} coordinates, dimension is {dim}",
                        c.len()
                    )));
                }
                Ok(WeightSpec::Power { a: *a, center: c })
            }
            WeightSpec::Step { axis, t, lo, hi } => {
                if *axis >= dim {
                    return Err(Error::NotAWeight(format!("step axis {axis} out of range for n={dim}")));
                }
                if !(*lo > 0.0) || !(*hi > 0.0) {
                    return Err(Error::NotAWeight("step levels must be positive".into()));
                }
                Ok(WeightSpec::Step { axis: *axis, t: *t, lo: *lo, hi: *hi })
            }
            WeightSpec::Prod(a, b) => Ok(WeightSpec::Prod(
                Box::new(a.normalize(dim)?),
                Box::new(b.normalize(dim)?),
            )),
        }
    }

    /// Sample onto a grid as a weight-density field.
    pub fn sample(&self, grid: &LatticeGrid) -> Result<ScalarField> {
        let spec = self.normalize(grid.dim())?;
        if let Some(min_dist) = spec.min_power_center_distance(grid) {
            if min_dist < 0.25 * grid.spacing() {
                return Err(Error::NotAWeight(
                    "power-weight center too close to a node; centers must lie on cell corners".into(),
                ));
            }
        }
        let values: Vec<f64> = (0..grid.node_count())
            .map(|lin| spec.eval(&grid.node_position(lin)))
            .collect();
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::NotAWeight(format!("sampled weight value {bad}")));
        }
        ScalarField::new(*grid, values, FieldKind::WeightDensity)
    }

    fn min_power_center_distance(&self, grid: &LatticeGrid) -> Option<f64> {
        match self {
            WeightSpec::Power { center, .. } => {
                let mut best = f64::INFINITY;
                for lin in 0..grid.node_count() {
                    let x = grid.node_position(lin);
                    let d2: f64 = x.iter().zip(center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                    best = best.min(d2.sqrt());
                }
                Some(best)
            }
            WeightSpec::Prod(a, b) => match (a.min_power_center_distance(grid), b.min_power_center_distance(grid)) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            },
            _ => None,
        }
    }
}

/// Parse the weight grammar:
/// `constant:c=<v>`, `power:a=<v>,center=<c1,..>`,
/// `step:axis=<i>,t=<v>,lo=<v>,hi=<v>`, `prod:(<spec>)*(<spec>)`.
/// Bare names take catalog defaults.
pub fn parse_weight(s: &str) -> Result<WeightSpec> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("prod:") {
        let (first, after) = take_parenthesized(rest)?;
        let after = after.trim_start();
        let after = after
            .strip_prefix('*')
            .ok_or_else(|| Error::Parse("prod expects `(<spec>)*(<spec>)`".into()))?;
        let (second, tail) = take_parenthesized(after.trim_start())?;
        if !tail.trim().is_empty() {
            return Err(Error::Parse(format!("trailing input `{tail}` after prod")));
        }
        return Ok(WeightSpec::Prod(
            Box::new(parse_weight(first)?),
            Box::new(parse_weight(second)?),
        ));
    }
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (s, ""),
    };
    let kv = parse_kv(rest)?;
    let scalar = |key: &str, default: f64| -> Result<f64> {
        match kv.iter().find(|(k, _)| k == key) {
            Some((_, vals)) if vals.len() == 1 => Ok(vals[0]),
            Some(_) => Err(Error::Parse(format!("{key} expects one value"))),
            None => Ok(default),
        }
    };
    match name {
        "constant" => Ok(WeightSpec::Constant { c: scalar("c", 1.0)? }),
        "power" => {
            let center = kv
                .iter()
                .find(|(k, _)| k == "center")
                .map(|(_, v)| v.clone())
                .unwrap_or_default();
            Ok(WeightSpec::Power { a: scalar("a", 0.5)?, center })
        }
        "step" => Ok(WeightSpec::Step {
            axis: scalar("axis", 0.0)? as usize,
            t: scalar("t", 0.5)?,
            lo: scalar("lo", 1.0)?,
            hi: scalar("hi", 2.0)?,
        }),
        other => Err(Error::Parse(format!("unknown weight id `{other}`"))),
    }
}

pub(crate) fn take_parenthesized(s: &str) -> Result<(&str, &str)> {
    let s = s.trim_start();
    if !s.starts_with('(') {
        return Err(Error::Parse("expected `(`".into()));
    }
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&s[1..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(Error::Parse("unbalanced parentheses".into()))
}

/// Point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub mass: f64,
}

/// Borel measure on the lattice cube: optional weight density plus a finite
/// list of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub density: Option<WeightSpec>,
    pub atoms: Vec<Atom>,
}

impl MeasureSpec {
    pub fn new(density: Option<WeightSpec>, atoms: Vec<Atom>) -> Result<MeasureSpec> {
        if density.is_none() && atoms.is_empty() {
            return Err(Error::Precondition("measure needs a density or at least one atom".into()));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0)) {
            return Err(Error::Precondition(format!("atom mass {} must be positive", a.mass)));
        }
        Ok(MeasureSpec { density, atoms })
    }

    /// Lebesgue measure.
    pub fn lebesgue() -> MeasureSpec {
        MeasureSpec { density: Some(WeightSpec::Constant { c: 1.0 }), atoms: Vec::new() }
    }

    pub fn from_weight(w: WeightSpec) -> MeasureSpec {
        MeasureSpec { density: Some(w), atoms: Vec::new() }
    }

    pub fn id(&self) -> String {
        let d = match &self.density {
            Some(w) => w.id(),
            None => "none".to_string(),
        };
        if self.atoms.is_empty() {
            d
        } else {
            let atoms: Vec<String> = self
                .atoms
                .iter()
                .map(|a| {
                    let pts: Vec<String> = a.point.iter().map(|p| p.to_string()).collect();
                    format!("{}:{}", pts.join(","), a.mass)
                })
                .collect();
            format!("{d}+atoms={}", atoms.join(";"))
        }
    }

    /// Per-cell masses on a grid: `h^n * density(node)` plus atoms attributed
    /// to their owning cell. Atoms outside the lattice cube carry no cell.
    pub fn cell_masses(&self, grid: &LatticeGrid) -> Result<Vec<f64>> {
        let mut masses = match &self.density {
            Some(w) => {
                let hn = grid.cell_volume();
                w.sample(grid)?.values().iter().map(|v| v * hn).collect()
            }
            None => vec![0.0; grid.node_count()],
        };
        for a in &self.atoms {
            if a.point.len() != grid.dim() {
                return Err(Error::Precondition(format!(
                    "atom at {:?} has wrong dimension",
                    a.point
                )));
            }
            if let Some(cell) = grid.owning_cell(&a.point) {
                masses[grid.ravel(&cell)] += a.mass;
            }
        }
        Ok(masses)
    }
}

/// Parse `x1,..:m;x1,..:m;...`.
pub fn parse_atoms(s: &str) -> Result<Vec<Atom>> {
    let mut out = Vec::new();
    for seg in s.split(';') {
        let seg = seg.trim();
        if seg.is_empty() {
            continue;
        }
        let (coords, mass) = seg
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("atom `{seg}` needs `coords:mass`")))?;
        let point: std::result::Result<Vec<f64>, _> = coords.split(',').map(|c| c.trim().parse()).collect();
        let point = point.map_err(|_| Error::Parse(format!("bad atom coordinates `{coords}`")))?;
        let mass: f64 = mass.trim().parse().map_err(|_| Error::Parse(format!("bad atom mass `{mass}`")))?;
        out.push(Atom { point, mass });
    }
    Ok(out)
}

/// Weighted measure of a grid-aligned cube: `h^n` times the density sum over
/// nodes inside, plus the atoms the cube contains.
pub fn measure_of(mu: &MeasureSpec, r: &Cube, grid: &LatticeGrid) -> Result<f64> {
    let window = align(grid, r)?;
    let mut acc = WideAccumulator::new();
    if let Some(w) = &mu.density {
        let field = w.sample(grid)?;
        let hn = grid.cell_volume();
        crate::lattice::for_each_node(grid, &window, |lin, _| {
            acc.add(field.values()[lin] * hn);
        });
    }
    for a in &mu.atoms {
        if window.contains_point(grid, &a.point) {
            acc.add(a.mass);
        }
    }
    Ok(acc.round())
}

/// Result of an A_p constant maximization.
#[derive(Debug, Clone)]
pub struct ApReport {
    pub p: f64,
    pub constant: f64,
    pub argmax: Cube,
    pub argmax_aligned: AlignedCube,
    pub grid: LatticeGrid,
}

/// Discrete A_1 constant of an analytic weight.
pub fn a1_constant(w: &WeightSpec, grid: &LatticeGrid) -> Result<ApReport> {
    a1_constant_field(&w.sample(grid)?)
}

/// Discrete A_1 constant of a sampled positive field:
/// max over aligned subcubes of `avg(w, R) / min_{nodes in R} w`.
pub fn a1_constant_field(w: &ScalarField) -> Result<ApReport> {
    let grid = *w.grid();
    if let Some(bad) = w.values().iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NotAWeight(format!("sample {bad} is not positive")));
    }
    let best = maximize_over_subcubes(&grid, w.values(), None, |avg_w, minv, _| avg_w / minv);
    Ok(ApReport {
        p: 1.0,
        constant: best.0,
        argmax: best.1.to_cube(&grid),
        argmax_aligned: best.1,
        grid,
    })
}

/// Discrete A_p constant for `p > 1`:
/// max over aligned subcubes of `avg(w,R) * avg(w^{1-p'},R)^{p-1}`.
pub fn ap_constant(w: &WeightSpec, p: f64, grid: &LatticeGrid) -> Result<ApReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(format!("A_p constant needs p > 1, got {p}")));
    }
    let field = w.sample(grid)?;
    ap_constant_field(&field, p)
}

pub fn ap_constant_field(w: &ScalarField, p: f64) -> Result<ApReport> {
    let grid = *w.grid();
    let pp = p / (p - 1.0);
    let dual: Vec<f64> = w.values().iter().map(|v| v.powf(1.0 - pp)).collect();
    let best = maximize_over_subcubes(&grid, w.values(), Some(&dual), |avg_w, _, avg_dual| {
        avg_w * avg_dual.powf(p - 1.0)
    });
    Ok(ApReport {
        p,
        constant: best.0,
        argmax: best.1.to_cube(&grid),
        argmax_aligned: best.1,
        grid,
    })
}

/// `[w]_{A_p}` with `p = 1` delegating to the A_1 definition.
pub fn weight_constant(w: &WeightSpec, p: f64, grid: &LatticeGrid) -> Result<ApReport> {
    if (p - 1.0).abs() < 1e-12 {
        a1_constant(w, grid)
    } else {
        ap_constant(w, p, grid)
    }
}

/// Shared subcube maximization. `score(avg_w, min_w, avg_dual)` is evaluated
/// for every aligned subcube; ties prefer the lexicographically smallest
/// corner, then the smallest side, making parallel reductions reproducible.
fn maximize_over_subcubes(
    grid: &LatticeGrid,
    values: &[f64],
    dual: Option<&[f64]>,
    score: impl Fn(f64, f64, f64) -> f64,
) -> (f64, AlignedCube) {
    let n = grid.dim();
    let res = grid.res();
    let hn = grid.cell_volume();
    let masses: Vec<f64> = values.iter().map(|v| v * hn).collect();
    let table = ExactPrefixTable::build(n, res, &masses);
    let dual_table = dual.map(|d| {
        let dm: Vec<f64> = d.iter().map(|v| v * hn).collect();
        ExactPrefixTable::build(n, res, &dm)
    });
    let mut best = f64::NEG_INFINITY;
    let mut best_cube = AlignedCube { lo: [0; 3], k: 1 };
    for k in 1..=res {
        let mins = box_min(values, n, res, k);
        let spots = res - k + 1;
        let volf = (k.pow(n as u32) as f64) * hn;
        let total = spots.pow(n as u32);
        for t in 0..total {
            let mut lo = [0usize; 3];
            let mut rem = t;
            for a in (0..n).rev() {
                lo[a] = rem % spots;
                rem /= spots;
            }
            let mut hi = [0usize; 3];
            for a in 0..n {
                hi[a] = lo[a] + k;
            }
            let avg_w = table.window_sum(&lo, &hi) / volf;
            let avg_dual = match &dual_table {
                Some(dt) => dt.window_sum(&lo, &hi) / volf,
                None => 0.0,
            };
            let val = score(avg_w, mins[t], avg_dual);
            let cand = AlignedCube { lo, k };
            if val > best
                || (val == best
                    && (cand.lo[..n] < best_cube.lo[..n]
                        || (cand.lo[..n] == best_cube.lo[..n] && cand.k < best_cube.k)))
            {
                best = val;
                best_cube = cand;
            }
        }
    }
    (best, best_cube)
}

/// Minimum over every k-cell window, via separable per-axis sliding minima.
/// Output is row-major over the `(res-k+1)^dim` anchors.
fn box_min(values: &[f64], dim: usize, res: usize, k: usize) -> Vec<f64> {
    let mut work = values.to_vec();
    let mut dims = [1usize; 3];
    dims[..dim].fill(res);
    for a in 0..dim {
        let m = res - k + 1;
        let mut out_dims = dims;
        out_dims[a] = m;
        let out_len: usize = out_dims[..dim].iter().product();
        let mut out = vec![0.0f64; out_len];
        let stride_of = |d: &[usize; 3]| {
            let mut s = [0usize; 3];
            let mut acc = 1;
            for ax in (0..dim).rev() {
                s[ax] = acc;
                acc *= d[ax];
            }
            s
        };
        let in_stride = stride_of(&dims);
        let out_stride = stride_of(&out_dims);
        let mut idx = [0usize; 3];
        for i0 in 0..out_dims[0] {
            idx[0] = i0;
            for i1 in 0..out_dims[1] {
                idx[1] = i1;
                for i2 in 0..out_dims[2] {
                    idx[2] = i2;
                    let base: usize = (0..dim).map(|ax| idx[ax] * in_stride[ax]).sum();
                    let mut m = f64::INFINITY;
                    for j in 0..k {
                        m = m.min(work[base + j * in_stride[a]]);
                    }
                    let opos: usize = (0..dim).map(|ax| idx[ax] * out_stride[ax]).sum();
                    out[opos] = m;
                }
            }
        }
        work = out;
        dims = out_dims;
    }
    work
}

/// Core ratio of the A_p function characterization: for nonnegative `u`,
/// `avg_Q u <= [w]_{A_p}^{1/p} (w(Q)^{-1} sum u^p w)^{1/p}`. Returns
/// `rho = LHS / ([w]^{1/p} RHS-core)`; the discrete inequality is exact.
pub fn check_ap_function_inequality(
    w: &WeightSpec,
    p: f64,
    u: &ScalarField,
    q: &Cube,
) -> Result<f64> {
    if u.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("A_p function inequality needs u >= 0".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("p = {p} must be >= 1")));
    }
    let grid = u.grid();
    let window = align(grid, q)?;
    let wf = w.sample(grid)?;
    let constant = weight_constant(w, p, grid)?.constant;
    let mut u_vals = Vec::new();
    let mut w_sum = WideAccumulator::new();
    let mut upw_sum = WideAccumulator::new();
    let hn = grid.cell_volume();
    crate::lattice::for_each_node(grid, &window, |lin, _| {
        let uv = u.values()[lin];
        let wv = wf.values()[lin];
        u_vals.push(uv);
        w_sum.add(wv * hn);
        upw_sum.add(uv.powf(p) * wv * hn);
    });
    let lhs = crate::sum::pairwise_sum(&u_vals) / u_vals.len() as f64;
    let rhs_core = (upw_sum.round() / w_sum.round()).powf(1.0 / p);
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / (constant.powf(1.0 / p) * rhs_core))
}

/// Core ratio of the A_p set characterization for a node subset `E` of `Q`:
/// `rho = (|E| / w(E)^{1/p}) / ([w]^{1/p} |Q| / w(Q)^{1/p})`.
pub fn check_ap_set_inequality(
    w: &WeightSpec,
    p: f64,
    e_nodes: &[usize],
    q: &Cube,
    grid: &LatticeGrid,
) -> Result<f64> {
    if e_nodes.is_empty() {
        return Err(Error::Precondition("set inequality needs a nonempty E".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("p = {p} must be >= 1")));
    }
    let window = align(grid, q)?;
    for &lin in e_nodes {
        let idx = grid.unravel(lin);
        if !window.contains_index(&idx, grid.dim()) {
            return Err(Error::Precondition("E contains nodes outside Q".into()));
        }
    }
    let wf = w.sample(grid)?;
    let constant = weight_constant(w, p, grid)?.constant;
    let hn = grid.cell_volume();
    let mut we = WideAccumulator::new();
    for &lin in e_nodes {
        we.add(wf.values()[lin] * hn);
    }
    let mut wq = WideAccumulator::new();
    let mut count = 0usize;
    crate::lattice::for_each_node(grid, &window, |lin, _| {
        wq.add(wf.values()[lin] * hn);
        count += 1;
    });
    let e_meas = e_nodes.len() as f64 * hn;
    let q_meas = count as f64 * hn;
    let lhs = e_meas / we.round().powf(1.0 / p);
    let rhs = q_meas / wq.round().powf(1.0 / p);
    Ok(lhs / (constant.powf(1.0 / p) * rhs))
}
