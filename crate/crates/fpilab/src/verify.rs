//! Inequality verification harness.
//!
//! Every supported inequality is decomposed as `LHS <= C(n) * K * RHS-core`
//! with `K` the explicit parameter factor (delta, p, weight constant, side
//! length) and `C(n)` the unknowable dimensional constant. A report records
//! both sides, `K`, and the core ratio `rho = LHS / (K * RHS-core)`; the
//! contracts downstream are finiteness, grid stability and sweep spreads of
//! `rho`, never `rho <= 1`.
//!
//! For checks that already produce a normalized core ratio (the pointwise
//! lemma suite, the A_p characterizations, Kolmogorov, Fefferman–Stein), the
//! report stores `lhs = rho * K` and `rhs_core = 1`, so the identity
//! `ratio = lhs / (k_factor * rhs_core)` holds for every row.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::catalog::CatalogFn;
use crate::lattice::{gradient_magnitude, LatticeGrid};
use crate::maximal::{
    check_coifman_rochberg, check_fefferman_stein, check_hedberg, check_local_frac_maximal_bound,
    iterated_maximal, FeffermanSteinMode, HedbergBound,
};
use crate::seminorm::{
    gagliardo_seminorm, kolmogorov_check, poincare_oscillation, product_kernel_samples,
    representation_check, sobolev_seminorm, weak_quasinorm_samples, ReprLemma, SeminormParams,
};
use crate::weights::{
    a1_constant, check_ap_function_inequality, check_ap_set_inequality, Atom, MeasureSpec,
    WeightSpec,
};

/// Identifiers of the verifiable inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InequalityId {
    /// (1,p)-Poincaré: mean oscillation vs the L^p gradient average.
    P1,
    /// Rough fractional Poincaré, factor `l^delta`.
    F0,
    /// Fractional Poincaré with the `(1-delta)^{1/p}` gain.
    F1,
    /// Gagliardo average controlled by the gradient average.
    EA,
    /// Weighted Gagliardo vs Sobolev, `p > 1`, A_1 weight.
    T21,
    /// Weighted Gagliardo vs Sobolev, `p = 1`, A_1 weight.
    T22,
    /// Weak-type product-space bound, `p = 1`, A_1 weight.
    T23,
    /// Borel-measure variant with the iterated maximal function.
    E51,
    /// Local fractional maximal operator L^1(w) bound.
    L41,
    /// Riesz vs centered maximal pointwise bound.
    L42A,
    /// Riesz vs non-centered maximal pointwise bound on Q0.
    L42B,
    /// Riesz of a weight vs its A_1 data.
    L42C,
    /// Oscillation bound by fractional local maximal functions.
    L43,
    /// Oscillation from the mean bound by a Riesz potential.
    L44,
    /// Lipschitz-type min/max maximal bound.
    L45,
    /// Weak (1,1) Fefferman–Stein.
    FSW,
    /// Strong (p,p) Fefferman–Stein.
    FSS,
    /// A_p characterization on functions.
    APF,
    /// A_p characterization on sets.
    APS,
    /// Coifman–Rochberg A_1 estimate for M(g)^{1/n'}.
    CR,
    /// Kolmogorov inequality.
    KOLM,
    /// Unweighted Gagliardo vs Sobolev with the alpha(delta, p) gain.
    L61,
    /// Seminorm comparison across orders beta <= delta.
    R62,
}

pub const ALL_IDS: [InequalityId; 23] = [
    InequalityId::P1,
    InequalityId::F0,
    InequalityId::F1,
    InequalityId::EA,
    InequalityId::T21,
    InequalityId::T22,
    InequalityId::T23,
    InequalityId::E51,
    InequalityId::L41,
    InequalityId::L42A,
    InequalityId::L42B,
    InequalityId::L42C,
    InequalityId::L43,
    InequalityId::L44,
    InequalityId::L45,
    InequalityId::FSW,
    InequalityId::FSS,
    InequalityId::APF,
    InequalityId::APS,
    InequalityId::CR,
    InequalityId::KOLM,
    InequalityId::L61,
    InequalityId::R62,
];

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<InequalityId> {
        ALL_IDS
            .iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown inequality id `{s}`")))
    }
}

/// The piecewise gain factor `alpha(delta, p)`; the case boundary
/// `(1-delta) p = 1` resolves to the middle case (value 1) with tolerance
/// 1e-12.
pub fn alpha_delta_p(delta: f64, p: f64) -> f64 {
    let s = (1.0 - delta) * p;
    if (s - 1.0).abs() <= 1e-12 {
        1.0
    } else if s < 1.0 {
        ((1.0 - s) * s).powf(1.0 / p)
    } else {
        (s - 1.0).powf(1.0 / p)
    }
}

/// Verification parameters beyond the (p, delta) axes.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub eta: Option<f64>,
    pub r: f64,
    pub beta: Option<f64>,
    pub diagonal_depth: usize,
    pub seed: u64,
    /// T23: full pair set up to this many ordered pairs, then deterministic
    /// stratified subsampling.
    pub max_pairs: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            eta: None,
            r: 1.0,
            beta: None,
            diagonal_depth: 0,
            seed: 0,
            max_pairs: 100_000_000,
        }
    }
}

/// One verified inequality instance.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub n: usize,
    pub res: usize,
    pub p: f64,
    pub delta: f64,
    pub weight_id: String,
    pub func_id: String,
    pub eta: f64,
    pub r: f64,
    pub diagonal_depth: usize,
    pub lhs: f64,
    pub rhs_core: f64,
    pub k_factor: f64,
    pub ratio: f64,
    pub a1_est: f64,
    pub normalized: bool,
    pub subsampled: bool,
    pub timestamp: u64,
}

impl InequalityReport {
    /// All numeric fields finite.
    pub fn is_valid(&self) -> bool {
        [self.lhs, self.rhs_core, self.k_factor, self.ratio, self.a1_est, self.eta, self.r]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Hypothesis gate per id; failures surface the violated requirement.
pub fn check_hypotheses(id: InequalityId, n: usize, p: f64, delta: f64) -> Result<()> {
    use InequalityId::*;
    let fail = |req: &str| Err(Error::hypothesis(&id.to_string(), req));
    if uses_delta(id) && !(delta > 0.0 && delta < 1.0) {
        return fail("0<delta<1");
    }
    if !(p >= 1.0) {
        return fail("p>=1");
    }
    match id {
        F1 => {
            if !(0.5..1.0).contains(&delta) {
                return fail("1/2<=delta<1");
            }
            if !(p < n as f64 / delta) {
                return fail("1<=p<n/delta");
            }
        }
        T21 => {
            if !(p > 1.0) {
                return fail("1<p<infinity");
            }
            if n < 2 {
                return fail("n>=2");
            }
        }
        T22 | T23 => {
            if p != 1.0 {
                return fail("p=1");
            }
            if n < 2 {
                return fail("n>=2");
            }
        }
        E51 | FSS => {
            if !(p > 1.0) {
                return fail("1<p<infinity");
            }
        }
        L45 | CR => {
            if n < 2 {
                return fail("n>=2");
            }
        }
        L41 | L42A | L42B | L42C => {
            // The delta axis carries alpha for the maximal/Riesz bounds.
            if !(delta > 0.0 && delta < n as f64) {
                return fail("0<alpha<n");
            }
        }
        _ => {}
    }
    Ok(())
}

fn uses_delta(id: InequalityId) -> bool {
    use InequalityId::*;
    !matches!(id, P1 | L41 | L42A | L42B | L42C | FSW | FSS | APF | APS | CR | KOLM)
}

/// Ids consuming a general measure (density plus atoms).
fn takes_measure(id: InequalityId) -> bool {
    use InequalityId::*;
    matches!(id, E51 | L42A | L42B | FSW | FSS | KOLM)
}

/// Ids whose statement is unweighted; the weight axis is ignored for them.
fn unweighted(id: InequalityId) -> bool {
    use InequalityId::*;
    matches!(id, P1 | F0 | F1 | EA | L43 | L44 | L45 | CR | L61 | R62)
}

/// Explicit parameter factor `K` of the id (the dimensional constant `C(n)`
/// is never included). `a1` is the discrete weight constant, `ell` the cube
/// side; for the maximal/Riesz ids the `delta` argument carries alpha.
pub fn paper_factor(
    id: InequalityId,
    n: usize,
    p: f64,
    delta: f64,
    a1: f64,
    ell: f64,
) -> Result<f64> {
    use InequalityId::*;
    check_hypotheses(id, n, p, delta)?;
    let pp = if p > 1.0 { p / (p - 1.0) } else { f64::INFINITY };
    Ok(match id {
        P1 => ell,
        F0 => ell.powf(delta),
        F1 => {
            (1.0 - delta).powf(1.0 / p) / (n as f64 - delta * p).powf(1.0 - 1.0 / p)
                * ell.powf(delta)
        }
        EA => (1.0 - delta).powf(-1.0 / p) * ell,
        T21 => pp * (1.0 - delta).powf(-1.0 / p) * a1.powf(2.0 / p) * ell,
        T22 => a1 * (1.0 - delta).powf(-2.0) * ell,
        T23 => a1.powf(2.0 + (1.0 - delta) / n as f64) / (delta * (1.0 - delta)) * ell,
        E51 => pp * (1.0 - delta).powf(-1.0 / p) * ell,
        L41 => a1.powf(1.0 + delta / n as f64) * ell.powf(delta) / delta,
        L42A | L42B | L42C => 1.0 / delta,
        L43 => 1.0 / beta_default(id, delta, None),
        L44 | L45 | FSW | CR => 1.0,
        FSS => pp,
        APF | APS => a1.powf(1.0 / p),
        KOLM => {
            let (q_exp, r_exp) = kolmogorov_exponents(p, None);
            r_exp / (r_exp - q_exp)
        }
        L61 => ell / alpha_delta_p(delta, p),
        R62 => ell.powf(delta),
    })
}

fn beta_default(id: InequalityId, delta: f64, beta: Option<f64>) -> f64 {
    match beta {
        Some(b) => b,
        None => match id {
            InequalityId::R62 => 0.5 * delta,
            _ => delta,
        },
    }
}

/// KOLM maps the p axis to `(q, r)`: `q = p`, and `r` from the r flag when it
/// exceeds q, else `r = 2q`.
fn kolmogorov_exponents(p: f64, r: Option<f64>) -> (f64, f64) {
    let q = p;
    let r = match r {
        Some(r) if r > q => r,
        _ => 2.0 * q,
    };
    (q, r)
}

/// Fractional order for the representation bounds: 1 for `n >= 2` (the
/// gradient-datum case), `(1 + beta)/2 < 1` in dimension one.
fn repr_alpha(n: usize, beta: f64) -> f64 {
    if n >= 2 {
        1.0
    } else {
        0.5 * (1.0 + beta)
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Evaluate one inequality instance on a grid.
#[allow(clippy::too_many_arguments)]
pub fn verify_inequality(
    id: InequalityId,
    func: &CatalogFn,
    weight: &WeightSpec,
    atoms: &[Atom],
    p: f64,
    delta: f64,
    params: &VerifyParams,
    grid: &LatticeGrid,
) -> Result<InequalityReport> {
    use InequalityId::*;
    let n = grid.dim();
    check_hypotheses(id, n, p, delta)?;
    let q = *grid.cube();
    let ell = q.side();
    let vol = q.volume();
    let u = func.sample(grid)?;
    let lebesgue = WeightSpec::Constant { c: 1.0 };
    let w = if unweighted(id) {
        if !matches!(weight, WeightSpec::Constant { .. }) {
            log::warn!("{id} is unweighted; ignoring weight {}", weight.id());
        }
        lebesgue.clone()
    } else {
        weight.normalize(n)?
    };
    let measure = if takes_measure(id) {
        MeasureSpec::new(Some(w.clone()), atoms.to_vec())?
    } else {
        if !atoms.is_empty() && !unweighted(id) {
            log::warn!("{id} takes a pure weight; ignoring {} atoms", atoms.len());
        }
        MeasureSpec::from_weight(w.clone())
    };
    let a1 = if unweighted(id) || id == E51 {
        1.0
    } else {
        a1_constant(&w, grid)?.constant
    };
    // eta is only meaningful for the representation ids; 0 marks "unused".
    let mut eta_used = params.eta.unwrap_or(0.0);
    let r_used = params.r;
    let mut normalized = true;
    let mut subsampled = false;
    let weight_id = if takes_measure(id) { measure.id() } else { w.id() };

    let (lhs, rhs_core, k): (f64, f64, f64) = match id {
        P1 => {
            let lhs = poincare_oscillation(&u, &q)?;
            let rhs = sobolev_seminorm(&u, p, &lebesgue, &q)? / vol.powf(1.0 / p);
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
        F0 | F1 => {
            let lhs = poincare_oscillation(&u, &q)?;
            let gag =
                gagliardo_seminorm(&u, p, delta, &MeasureSpec::lebesgue(), &q, params.diagonal_depth)?;
            (lhs, gag / vol.powf(1.0 / p), paper_factor(id, n, p, delta, a1, ell)?)
        }
        EA | L61 => {
            let gag =
                gagliardo_seminorm(&u, p, delta, &MeasureSpec::lebesgue(), &q, params.diagonal_depth)?;
            let lhs = ell.powf(delta) * gag / vol.powf(1.0 / p);
            let rhs = sobolev_seminorm(&u, p, &lebesgue, &q)? / vol.powf(1.0 / p);
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
        T21 | T22 => {
            let gag = gagliardo_seminorm(&u, p, delta, &measure, &q, params.diagonal_depth)?;
            let lhs = ell.powf(delta) * gag;
            let rhs = sobolev_seminorm(&u, p, &w, &q)?;
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
        T23 => {
            normalized = false;
            let set = product_kernel_samples(&u, delta, &w, &q, params.max_pairs, params.seed)?;
            subsampled = set.subsampled;
            let pairs: Vec<(f64, f64)> = set.samples.iter().map(|s| (s.value, s.weight)).collect();
            let weak = weak_quasinorm_samples(&pairs, 1.0, false)?;
            let lhs = ell.powf(delta) * weak;
            let rhs = sobolev_seminorm(&u, 1.0, &w, &q)?;
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
        E51 => {
            let gag = gagliardo_seminorm(&u, p, delta, &measure, &q, params.diagonal_depth)?;
            let lhs = ell.powf(delta) * gag;
            let m2 = iterated_maximal(&measure, grid, Some(q))?;
            let gm = gradient_magnitude(&u)?;
            let hn = grid.cell_volume();
            let terms: Vec<f64> = gm
                .values()
                .iter()
                .zip(m2.values())
                .map(|(g, m)| g.powf(p) * m * hn)
                .collect();
            let rhs = crate::sum::pairwise_sum(&terms).powf(1.0 / p);
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
        L41 => {
            let k = paper_factor(id, n, p, delta, a1, ell)?;
            let rho = check_local_frac_maximal_bound(&u.abs(), &w, delta, &q, grid)?;
            (rho * k, 1.0, k)
        }
        L42A | L42B | L42C => {
            let bound = match id {
                L42A => HedbergBound::LemEq1,
                L42B => HedbergBound::LemEq2,
                _ => HedbergBound::LemEq3,
            };
            let k = paper_factor(id, n, p, delta, a1, ell)?;
            let rho = check_hedberg(bound, &measure, delta, &q, grid)?.max_ratio;
            (rho * k, 1.0, k)
        }
        L43 | L44 | L45 => {
            let beta = beta_default(id, delta, params.beta);
            let alpha = repr_alpha(n, beta);
            let eta = params.eta.unwrap_or(0.5 * (n as f64 - alpha));
            eta_used = eta;
            let sp = SeminormParams { p, delta, r: r_used, beta, alpha, eta, kappa: 1.0 };
            let lemma = match id {
                L43 => ReprLemma::L43,
                L44 => ReprLemma::L44,
                _ => ReprLemma::L45,
            };
            let gm = gradient_magnitude(&u)?;
            let rep = representation_check(lemma, &u, &gm, sp, &q, None)?;
            let k = if id == L43 { 1.0 / beta } else { 1.0 };
            (rep.max_ratio, 1.0, k)
        }
        FSW => {
            normalized = false;
            let rho = check_fefferman_stein(FeffermanSteinMode::Weak, &u, &measure, 1.0, grid)?;
            (rho, 1.0, 1.0)
        }
        FSS => {
            let k = paper_factor(id, n, p, delta, a1, ell)?;
            let rho = check_fefferman_stein(FeffermanSteinMode::Strong, &u, &measure, p, grid)?;
            (rho * k, 1.0, k)
        }
        APF => {
            let k = paper_factor(id, n, p, delta, a1, ell)?;
            let rho = check_ap_function_inequality(&w, p, &u.abs(), &q)?;
            (rho * k, 1.0, k)
        }
        APS => {
            let k = paper_factor(id, n, p, delta, a1, ell)?;
            let half: Vec<usize> = (0..grid.node_count())
                .filter(|&lin| grid.unravel(lin)[0] < grid.res() / 2)
                .collect();
            let rho = check_ap_set_inequality(&w, p, &half, &q, grid)?;
            (rho * k, 1.0, k)
        }
        CR => {
            let gm = gradient_magnitude(&u)?;
            let est = check_coifman_rochberg(&gm, &q, grid)?;
            (est, 1.0, 1.0)
        }
        KOLM => {
            let (q_exp, r_exp) =
                kolmogorov_exponents(p, if params.r > 1.0 { Some(params.r) } else { None });
            let k = r_exp / (r_exp - q_exp);
            let rho = kolmogorov_check(&u.abs(), q_exp, r_exp, &measure, &q)?;
            (rho * k, 1.0, k)
        }
        R62 => {
            let beta = beta_default(id, delta, params.beta);
            if !(beta > 0.0 && beta <= delta) {
                return Err(Error::hypothesis("R62", "0<beta<=delta"));
            }
            let g_beta =
                gagliardo_seminorm(&u, p, beta, &MeasureSpec::lebesgue(), &q, params.diagonal_depth)?;
            let g_delta =
                gagliardo_seminorm(&u, p, delta, &MeasureSpec::lebesgue(), &q, params.diagonal_depth)?;
            let lhs = ell.powf(beta) * g_beta / vol.powf(1.0 / p);
            let rhs = g_delta / vol.powf(1.0 / p);
            (lhs, rhs, paper_factor(id, n, p, delta, a1, ell)?)
        }
    };
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / (k * rhs_core) };
    Ok(InequalityReport {
        id,
        n,
        res: grid.res(),
        p,
        delta,
        weight_id,
        func_id: func.id(),
        eta: eta_used,
        r: r_used,
        diagonal_depth: params.diagonal_depth,
        lhs,
        rhs_core,
        k_factor: k,
        ratio,
        a1_est: a1,
        normalized,
        subsampled,
        timestamp: now_unix(),
    })
}

/// Per-id sweep summary.
#[derive(Debug, Clone)]
pub struct IdSummary {
    pub id: InequalityId,
    pub rows: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// max/min over the rows with nonzero ratio (0 when none).
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<InequalityReport>,
    pub summaries: Vec<IdSummary>,
    pub skipped: Vec<String>,
}

/// Cross-product sweep. Inadmissible combinations are skipped with a logged
/// reason; an empty admissible set is an error.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    ids: &[InequalityId],
    deltas: &[f64],
    ps: &[f64],
    weights: &[WeightSpec],
    funcs: &[CatalogFn],
    atoms: &[Atom],
    params: &VerifyParams,
    grid: &LatticeGrid,
) -> Result<SweepTable> {
    let mut combos = Vec::new();
    let mut skipped = Vec::new();
    for &id in ids {
        for &delta in deltas {
            for &p in ps {
                for w in weights {
                    for f in funcs {
                        match check_hypotheses(id, grid.dim(), p, delta) {
                            Ok(()) => combos.push((id, delta, p, w.clone(), f.clone())),
                            Err(e) => skipped.push(format!("{id} delta={delta} p={p}: {e}")),
                        }
                    }
                }
            }
        }
    }
    if combos.is_empty() {
        return Err(Error::NothingToSweep);
    }
    for s in &skipped {
        log::info!("skipped: {s}");
    }
    let rows: Result<Vec<InequalityReport>> = combos
        .par_iter()
        .map(|(id, delta, p, w, f)| verify_inequality(*id, f, w, atoms, *p, *delta, params, grid))
        .collect();
    let mut rows = rows?;
    sort_rows(&mut rows);
    let summaries = summarize(&rows);
    Ok(SweepTable { rows, summaries, skipped })
}

/// Canonical row order: (id, delta, p, weight, func, N).
pub fn sort_rows(rows: &mut [InequalityReport]) {
    rows.sort_by(|a, b| {
        a.id.cmp(&b.id)
            .then_with(|| a.delta.total_cmp(&b.delta))
            .then_with(|| a.p.total_cmp(&b.p))
            .then_with(|| a.weight_id.cmp(&b.weight_id))
            .then_with(|| a.func_id.cmp(&b.func_id))
            .then_with(|| a.res.cmp(&b.res))
    });
}

pub fn summarize(rows: &[InequalityReport]) -> Vec<IdSummary> {
    let mut out: Vec<IdSummary> = Vec::new();
    for id in ALL_IDS {
        let ratios: Vec<f64> = rows.iter().filter(|r| r.id == id).map(|r| r.ratio).collect();
        if ratios.is_empty() {
            continue;
        }
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let positive: Vec<f64> = ratios.iter().cloned().filter(|&v| v > 0.0).collect();
        let spread = if positive.is_empty() {
            0.0
        } else {
            positive.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                / positive.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        out.push(IdSummary { id, rows: ratios.len(), max_ratio: max, min_ratio: min, spread });
    }
    out
}

/// 17-significant-digit serialization used by every CSV writer.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const REPORT_HEADER: &str =
    "id,n,N,p,delta,weight,func,eta,r,diag_depth,lhs,rhs_core,k_factor,ratio,a1_est,normalized";

/// Serialize reports in the canonical column order; summaries become trailing
/// comment lines. The `subsampled` column appears only when some row used
/// subsampling.
pub fn reports_to_csv(rows: &[InequalityReport], summaries: &[IdSummary]) -> String {
    let any_sub = rows.iter().any(|r| r.subsampled);
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    if any_sub {
        out.push_str(",subsampled");
    }
    out.push('\n');
    for r in rows {
        let fields = [
            r.id.to_string(),
            r.n.to_string(),
            r.res.to_string(),
            fmt_real(r.p),
            fmt_real(r.delta),
            csv_escape(&r.weight_id),
            csv_escape(&r.func_id),
            fmt_real(r.eta),
            fmt_real(r.r),
            r.diagonal_depth.to_string(),
            fmt_real(r.lhs),
            fmt_real(r.rhs_core),
            fmt_real(r.k_factor),
            fmt_real(r.ratio),
            fmt_real(r.a1_est),
            r.normalized.to_string(),
        ];
        out.push_str(&fields.join(","));
        if any_sub {
            out.push(',');
            out.push_str(&r.subsampled.to_string());
        }
        out.push('\n');
    }
    for s in summaries {
        out.push_str(&format!(
            "# summary id={} rows={} max_ratio={} min_ratio={} spread={}\n",
            s.id,
            s.rows,
            fmt_real(s.max_ratio),
            fmt_real(s.min_ratio),
            fmt_real(s.spread)
        ));
    }
    out
}

/// Grid-convergence study: one report per resolution plus observed-order
/// estimates from consecutive ratio triples.
pub struct ConvergenceTable {
    pub rows: Vec<InequalityReport>,
    pub slopes: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    id: InequalityId,
    func: &CatalogFn,
    weight: &WeightSpec,
    atoms: &[Atom],
    p: f64,
    delta: f64,
    params: &VerifyParams,
    cube: crate::lattice::Cube,
    res_list: &[usize],
) -> Result<ConvergenceTable> {
    if res_list.len() < 2 || res_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("resolution list must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    for &res in res_list {
        let grid = crate::lattice::make_grid(cube, res)?;
        rows.push(verify_inequality(id, func, weight, atoms, p, delta, params, &grid)?);
    }
    let mut slopes = Vec::new();
    for w in rows.windows(3) {
        let d1 = (w[0].ratio - w[1].ratio).abs();
        let d2 = (w[1].ratio - w[2].ratio).abs();
        if d1 > 0.0 && d2 > 0.0 {
            slopes.push((d1 / d2).log2());
        }
    }
    Ok(ConvergenceTable { rows, slopes })
}

pub fn convergence_to_csv(table: &ConvergenceTable) -> String {
    let mut out = reports_to_csv(&table.rows, &[]);
    for s in &table.slopes {
        out.push_str(&format!("# slope ratio {}\n", fmt_real(*s)));
    }
    out
}
