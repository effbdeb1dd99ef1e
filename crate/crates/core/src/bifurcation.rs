//! Critical points of a one-parameter family, local and global bifurcation
//! invariants, and the odd-mode parity test for unbounded non-radial branches.
//!
//! Coefficients are always computed as differences of degree coefficients on
//! either side of a critical point. The closed forms in terms of `J` and
//! `S(alpha^+)` are evaluated alongside and compared; disagreements are
//! reported, never corrected.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bessel::BesselZeroTable;
use crate::burnside;
use crate::degree::{self, Certificate, DegreeOptions, IndexTriple, ModeProfile};
use crate::error::{domain, Error, Result};
use crate::spectral::{check_nondegeneracy, FamilyKind, MatrixFamily, DEFAULT_SPECTRAL_TOL};

/// Number of grid cells used when no step is given.
pub const DEFAULT_GRID_CELLS: usize = 1024;
/// Bisection width relative to `max(1, |alpha|)`.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
// A branch this close to a Dirichlet eigenvalue at two grid points is treated
// as sitting on it.
const CONTINUUM_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationOptions {
    /// Grid spacing; `None` means `(hi - lo) / 1024`.
    pub grid_step: Option<f64>,
    pub rel_tol: f64,
    pub spectral_tol: f64,
    pub degree: DegreeOptions,
}

impl Default for BifurcationOptions {
    fn default() -> Self {
        Self {
            grid_step: None,
            rel_tol: DEFAULT_REL_TOL,
            spectral_tol: DEFAULT_SPECTRAL_TOL,
            degree: DegreeOptions::default(),
        }
    }
}

impl BifurcationOptions {
    fn tol_at(&self, alpha: f64) -> f64 {
        self.rel_tol * alpha.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    /// The branch reaches the Dirichlet eigenvalue without passing it.
    Touch,
}

/// `mu_j` meets `s_{m,n}` at `alpha`. For curve families `j` is the 1-based
/// branch number; for matrix families it is the 1-based rank among real
/// eigenvalues in decreasing order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub m: u32,
    pub n: u32,
    pub j: usize,
    pub direction: Direction,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub alpha: f64,
    pub crossings: Vec<Crossing>,
    /// Regular parameters `(alpha^-, alpha^+)` around `alpha`.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalInvariant {
    pub alpha: f64,
    pub bracket: (f64, f64),
    /// `n^m(alpha^+) - n^m(alpha^-)`, nonzero entries only; key 0 is the radial mode.
    pub t_counts: BTreeMap<u32, i64>,
    #[serde(rename = "J")]
    pub j_set: Vec<u32>,
    #[serde(rename = "S_minus")]
    pub s_minus: Vec<u32>,
    #[serde(rename = "S_plus")]
    pub s_plus: Vec<u32>,
    /// Nonzero `(H_{m0})` coefficients of the invariant.
    pub coeffs: BTreeMap<u32, i64>,
    /// Nonzero values of the closed form in `J` and `S(alpha^+)`.
    pub closed_form: BTreeMap<u32, i64>,
    pub closed_form_agrees: bool,
    /// Parity of the radial count differs on the two sides.
    pub radial_flip: bool,
    #[serde(skip)]
    pub minus: ModeProfile,
    #[serde(skip)]
    pub plus: ModeProfile,
}

/// A local branch certificate at a critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCertificate {
    pub alpha: f64,
    #[serde(flatten)]
    pub cert: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundedCertificate {
    pub m0: u32,
    /// `[alpha_0, alpha_N]`, the span of the critical set.
    pub interval: (f64, f64),
    pub unbounded: bool,
    pub non_radial: bool,
    pub guarantee: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalReport {
    pub lambda: Vec<CriticalPoint>,
    pub local: Vec<LocalInvariant>,
    pub t_lambda: BTreeMap<u32, i64>,
    pub j_lambda: Vec<u32>,
    /// Endpoint difference `coeff(alpha_0^-) - coeff(alpha_N^+)`, nonzero entries.
    pub sum_coeffs: BTreeMap<u32, i64>,
    pub closed_form: BTreeMap<u32, i64>,
    pub closed_form_agrees: bool,
    pub kfixed_certificates: Vec<UnboundedCertificate>,
    /// Odd-mode, odd-multiplicity triples at `alpha_0^-` and `alpha_N^+`.
    pub sigma_k_start: Vec<IndexTriple>,
    pub sigma_k_end: Vec<IndexTriple>,
    pub warnings: Vec<String>,
}

struct Scanner<'a> {
    family: &'a MatrixFamily,
    table: &'a BesselZeroTable,
    opts: &'a BifurcationOptions,
    curves: bool,
}

struct Threshold {
    m: u32,
    n: u32,
    s: f64,
}

impl<'a> Scanner<'a> {
    fn new(family: &'a MatrixFamily, table: &'a BesselZeroTable, opts: &'a BifurcationOptions) -> Self {
        Self {
            family,
            table,
            opts,
            curves: matches!(family.kind(), FamilyKind::Curves(_)),
        }
    }

    fn values(&self, alpha: f64) -> Result<Vec<f64>> {
        let (v, _) = self.family.branch_values(alpha, self.opts.spectral_tol)?;
        Ok(v.into_iter().map(|(mu, _)| mu).collect())
    }

    fn count_above(&self, alpha: f64, s: f64) -> Result<usize> {
        Ok(self.values(alpha)?.into_iter().filter(|&v| v > s).count())
    }

    fn is_degenerate(&self, alpha: f64) -> Result<bool> {
        let spec = self.family.spectrum_at(alpha, self.opts.spectral_tol)?;
        Ok(!check_nondegeneracy(&spec.entries, self.table, self.opts.degree.guard)?.is_empty())
    }

    fn grid(&self) -> Result<(Vec<f64>, f64)> {
        let (lo, hi) = self.family.domain();
        let width = hi - lo;
        let step = match self.opts.grid_step {
            Some(s) if s > 0.0 && s.is_finite() => s,
            Some(s) => return Err(domain(format!("grid step must be positive, got {s}"))),
            None => width / DEFAULT_GRID_CELLS as f64,
        };
        if width == 0.0 {
            return Ok((vec![lo], 0.0));
        }
        let cells = (width / step).ceil();
        if cells > 1e7 {
            return Err(Error::Capacity {
                what: "bifurcation grid cells",
                limit: 10_000_000,
            });
        }
        let cells = cells as usize;
        let mut pts: Vec<f64> = (0..cells).map(|i| lo + i as f64 * step).collect();
        pts.push(hi);
        pts.extend(self.family.breakpoints());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok((pts, step))
    }

    fn thresholds(&self, top: f64) -> Result<Vec<Threshold>> {
        let mut out = Vec::new();
        let bound = top + self.opts.degree.guard * top.abs().max(1.0);
        if let Some(mmax) = self.table.max_mode_up_to(bound)? {
            for m in 0..=mmax {
                for (n, s) in self.table.zeros_up_to(m, bound)? {
                    out.push(Threshold { m, n, s });
                }
            }
        }
        out.sort_by(|a, b| a.s.total_cmp(&b.s));
        Ok(out)
    }

    fn find_crossings(&self, grid: &[f64], samples: &[Vec<f64>], th: &[Threshold]) -> Result<Vec<Crossing>> {
        let mut out = Vec::new();
        for (i, w) in grid.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let (va, vb) = (&samples[i], &samples[i + 1]);
            if self.curves {
                for (bi, (&x, &y)) in va.iter().zip(vb).enumerate() {
                    let (low, high) = (x.min(y), x.max(y));
                    // thresholds s with low <= s < high flip the side `mu > s`
                    let start = th.partition_point(|t| t.s < low);
                    for t in th[start..].iter().take_while(|t| t.s < high) {
                        let alpha = self.bisect_curve(bi, t.s, a, b, x > t.s)?;
                        out.push(Crossing {
                            m: t.m,
                            n: t.n,
                            j: bi + 1,
                            direction: if y > x { Direction::Up } else { Direction::Down },
                            alpha,
                        });
                    }
                }
            } else {
                let (lo_v, hi_v) = va
                    .iter()
                    .chain(vb)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
                let start = th.partition_point(|t| t.s < lo_v);
                for t in th[start..].iter().take_while(|t| t.s < hi_v) {
                    self.matrix_crossings(t, a, b, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    fn bisect_curve(&self, branch: usize, s: f64, mut lo: f64, mut hi: f64, lo_above: bool) -> Result<f64> {
        while hi - lo > self.opts.tol_at(lo) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.values(mid)?[branch] > s) == lo_above {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Every change of the count of real eigenvalues above `t.s` inside `[a, b]`.
    fn matrix_crossings(&self, t: &Threshold, a: f64, b: f64, out: &mut Vec<Crossing>) -> Result<()> {
        let end_count = self.count_above(b, t.s)?;
        let mut lo = a;
        let mut c_lo = self.count_above(a, t.s)?;
        while c_lo != end_count {
            let mut hi = b;
            while hi - lo > self.opts.tol_at(lo) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_above(mid, t.s)? == c_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c_hi = self.count_above(hi, t.s)?;
            let alpha = 0.5 * (lo + hi);
            let (direction, ranks) = if c_hi > c_lo {
                (Direction::Up, c_lo + 1..=c_hi)
            } else {
                (Direction::Down, c_hi + 1..=c_lo)
            };
            for j in ranks {
                out.push(Crossing {
                    m: t.m,
                    n: t.n,
                    j,
                    direction,
                    alpha,
                });
            }
            lo = hi;
            c_lo = c_hi;
        }
        Ok(())
    }

    /// Locates the closest approach of any branch to a Dirichlet eigenvalue
    /// flagged at a grid point.
    fn touch(&self, a: f64, b: f64, at: f64) -> Result<Crossing> {
        let spec = self.family.spectrum_at(at, self.opts.spectral_tol)?;
        let v = check_nondegeneracy(&spec.entries, self.table, self.opts.degree.guard)?;
        let first = v[0];
        let s = first.eigenvalue;
        let dist = |alpha: f64| -> Result<(f64, usize)> {
            Ok(self
                .values(alpha)?
                .into_iter()
                .enumerate()
                .map(|(i, mu)| ((mu - s).abs(), i))
                .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc }))
        };
        let (mut lo, mut hi) = (a, b);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            if hi - lo <= self.opts.tol_at(lo) {
                break;
            }
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if dist(x1)?.0 <= dist(x2)?.0 {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let alpha = 0.5 * (lo + hi);
        let (_, branch) = dist(alpha)?;
        Ok(Crossing {
            m: first.m,
            n: first.n,
            j: branch + 1,
            direction: Direction::Touch,
            alpha,
        })
    }

    /// Two or more grid points in a degenerate run sitting on the same
    /// Dirichlet eigenvalue to within the bisection tolerance.
    fn reject_continuum(&self, run: &[f64]) -> Result<()> {
        if run.len() < 2 {
            return Ok(());
        }
        let mut hits: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for &alpha in run {
            let spec = self.family.spectrum_at(alpha, self.opts.spectral_tol)?;
            for v in check_nondegeneracy(&spec.entries, self.table, self.opts.degree.guard)? {
                if (v.mu - v.eigenvalue).abs() <= CONTINUUM_REL * v.eigenvalue.max(1.0) {
                    let n = hits.entry((v.m, v.n)).or_default();
                    *n += 1;
                    if *n >= 2 {
                        return Err(Error::NonIsolated {
                            alpha,
                            reason: format!("an eigenvalue stays on s_{{{},{}}} across grid points", v.m, v.n),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Searches each side independently, starting halfway to the neighbouring
    /// critical point (or at the interval end) and halving toward `alpha`.
    fn bracket(&self, alpha: f64, prev: f64, next: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.family.domain();
        let tol = self.opts.tol_at(alpha);
        let side = |limit: f64, toward: f64| -> Result<f64> {
            let mut delta = limit;
            if !(delta > tol) {
                let reason = if (alpha - lo).abs() <= tol || (hi - alpha).abs() <= tol {
                    "critical point at the end of the parameter interval"
                } else {
                    "critical points closer than the bisection tolerance"
                };
                return Err(Error::NonIsolated {
                    alpha,
                    reason: reason.into(),
                });
            }
            while delta > tol {
                let x = alpha + toward * delta;
                if !self.is_degenerate(x)? {
                    return Ok(x);
                }
                delta *= 0.5;
            }
            Err(Error::NonIsolated {
                alpha,
                reason: "no regular bracket at the bisection tolerance".into(),
            })
        };
        let minus = side((0.5 * (alpha - prev)).min(alpha - lo), -1.0)?;
        let plus = side((0.5 * (next - alpha)).min(hi - alpha), 1.0)?;
        Ok((minus, plus))
    }
}

fn merge(mut crossings: Vec<Crossing>, opts: &BifurcationOptions) -> Vec<(f64, Vec<Crossing>)> {
    crossings.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.m.cmp(&b.m))
            .then(a.n.cmp(&b.n))
            .then(a.j.cmp(&b.j))
    });
    let mut groups: Vec<Vec<Crossing>> = Vec::new();
    for c in crossings {
        match groups.last_mut() {
            Some(g) if c.alpha - g[g.len() - 1].alpha <= 10.0 * opts.tol_at(c.alpha) => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    groups
        .into_iter()
        .map(|mut g| {
            let alpha = 0.5 * (g[0].alpha + g[g.len() - 1].alpha);
            g.sort_by(|a, b| a.m.cmp(&b.m).then(a.n.cmp(&b.n)).then(a.j.cmp(&b.j)));
            (alpha, g)
        })
        .collect()
}

/// Critical points of `family`, in increasing `alpha`, each with a verified
/// regular bracket.
pub fn find_critical_points(
    family: &MatrixFamily,
    table: &BesselZeroTable,
    opts: &BifurcationOptions,
) -> Result<Vec<CriticalPoint>> {
    let sc = Scanner::new(family, table, opts);
    let (grid, step) = sc.grid()?;
    if grid.len() < 2 {
        return Ok(Vec::new());
    }
    let samples = grid.iter().map(|&a| sc.values(a)).collect::<Result<Vec<_>>>()?;
    let top = samples.iter().flatten().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v));
    let th = sc.thresholds(top)?;
    let mut groups = merge(sc.find_crossings(&grid, &samples, &th)?, opts);

    // Runs of degenerate grid points with no located crossing nearby are
    // tangential touches, or a continuum of critical parameters.
    let degenerate = grid.iter().map(|&a| sc.is_degenerate(a)).collect::<Result<Vec<_>>>()?;
    let mut touches = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !degenerate[i] {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < grid.len() && degenerate[i + 1] {
            i += 1;
        }
        let last = i;
        i += 1;
        let a = grid[first.saturating_sub(1)];
        let b = grid[(last + 1).min(grid.len() - 1)];
        sc.reject_continuum(&grid[first..=last])?;
        if groups.iter().any(|g| g.0 >= a && g.0 <= b) {
            continue;
        }
        if first == 0 || last + 1 == grid.len() {
            return Err(Error::NonIsolated {
                alpha: grid[if first == 0 { 0 } else { last }],
                reason: "critical point at the end of the parameter interval".into(),
            });
        }
        touches.push(sc.touch(a, b, grid[first])?);
    }
    if !touches.is_empty() {
        let mut all: Vec<Crossing> = groups.into_iter().flat_map(|g| g.1).collect();
        all.extend(touches);
        groups = merge(all, opts);
    }

    let (lo, hi) = family.domain();
    let mut out = Vec::with_capacity(groups.len());
    for (k, (alpha, crossings)) in groups.iter().enumerate() {
        let prev = if k == 0 { lo - step } else { groups[k - 1].0 };
        let next = groups.get(k + 1).map_or(hi + step, |g| g.0);
        let bracket = sc.bracket(*alpha, prev, next)?;
        out.push(CriticalPoint {
            alpha: *alpha,
            crossings: crossings.clone(),
            bracket,
        });
    }
    Ok(out)
}

fn profile_at(
    family: &MatrixFamily,
    table: &BesselZeroTable,
    opts: &BifurcationOptions,
    alpha: f64,
) -> Result<ModeProfile> {
    let spec = family.spectrum_at(alpha, opts.spectral_tol)?;
    degree::build_profile_from_analysis(&spec, table, &opts.degree)
}

fn count_diff(minus: &ModeProfile, plus: &ModeProfile) -> BTreeMap<u32, i64> {
    let modes: BTreeSet<u32> = minus.counts.keys().chain(plus.counts.keys()).copied().collect();
    modes
        .into_iter()
        .filter_map(|m| {
            let t = plus.count(m) as i64 - minus.count(m) as i64;
            (t != 0).then_some((m, t))
        })
        .collect()
}

fn odd_modes(t: &BTreeMap<u32, i64>) -> Vec<u32> {
    t.iter()
        .filter(|&(&m, &v)| m >= 1 && v % 2 != 0)
        .map(|(&m, _)| m)
        .collect()
}

/// `coeff(minus) - coeff(plus)` for every `m0` where either side can be nonzero.
fn normative_difference(minus: &ModeProfile, plus: &ModeProfile, opts: &DegreeOptions) -> Result<BTreeMap<u32, i64>> {
    let top = minus.s_set.iter().chain(&plus.s_set).copied().max().unwrap_or(0);
    let mut out = BTreeMap::new();
    for m0 in 1..=top {
        let d = degree::degree_coeff(minus, m0, opts)?
            .checked_sub(degree::degree_coeff(plus, m0, opts)?)
            .ok_or(Error::Overflow)?;
        if d != 0 {
            out.insert(m0, d);
        }
    }
    Ok(out)
}

/// `-[m0 in J] (-1)^{[n^{m0}(+) odd]}
///   + 2 sum_{I in P(J), I != {}, {m0}} (-2)^{|I|-2} [B(I)] [m0 = gcd I] (-1)^{[I in P(S(+))]}`
fn closed_form_at(j_set: &[u32], plus: &ModeProfile, m0: u32, opts: &DegreeOptions) -> Result<i64> {
    burnside::check_cap(j_set.len(), opts.powerset_cap)?;
    let first = if j_set.contains(&m0) {
        if plus.count(m0) % 2 == 1 {
            1
        } else {
            -1
        }
    } else {
        0
    };
    let in_plus = |i: &[u32]| -> i64 {
        if i.iter().all(|m| plus.s_set.binary_search(m).is_ok()) {
            -1
        } else {
            1
        }
    };
    let sum = burnside::weighted_gcd_sum(j_set, m0, in_plus)?;
    sum.checked_mul(2)
        .and_then(|s| s.checked_add(first))
        .ok_or(Error::Overflow)
}

fn closed_form_map(j_set: &[u32], plus: &ModeProfile, opts: &DegreeOptions) -> Result<BTreeMap<u32, i64>> {
    let mut out = BTreeMap::new();
    for m0 in 1..=j_set.last().copied().unwrap_or(0) {
        let c = closed_form_at(j_set, plus, m0, opts)?;
        if c != 0 {
            out.insert(m0, c);
        }
    }
    Ok(out)
}

fn invariant_between(
    alpha: f64,
    bracket: (f64, f64),
    minus: ModeProfile,
    plus: ModeProfile,
    opts: &DegreeOptions,
) -> Result<LocalInvariant> {
    let t_counts = count_diff(&minus, &plus);
    let j_set = odd_modes(&t_counts);
    let coeffs = normative_difference(&minus, &plus, opts)?;
    let closed_form = closed_form_map(&j_set, &plus, opts)?;
    Ok(LocalInvariant {
        alpha,
        bracket,
        closed_form_agrees: closed_form == coeffs,
        radial_flip: minus.n0 % 2 != plus.n0 % 2,
        s_minus: minus.s_set.clone(),
        s_plus: plus.s_set.clone(),
        t_counts,
        j_set,
        coeffs,
        closed_form,
        minus,
        plus,
    })
}

pub fn local_invariant(
    family: &MatrixFamily,
    cp: &CriticalPoint,
    table: &BesselZeroTable,
    opts: &BifurcationOptions,
) -> Result<LocalInvariant> {
    let minus = profile_at(family, table, opts, cp.bracket.0)?;
    let plus = profile_at(family, table, opts, cp.bracket.1)?;
    invariant_between(cp.alpha, cp.bracket, minus, plus, &opts.degree)
}

pub fn krasnoselskii_certificates(local: &LocalInvariant) -> Vec<BranchCertificate> {
    local
        .coeffs
        .iter()
        .map(|(&m0, &c)| BranchCertificate {
            alpha: local.alpha,
            cert: Certificate::new(
                m0,
                c,
                format!(
                    "branch of non-trivial solutions bifurcating from ({}, 0) with symmetries at least (H_{m0})",
                    local.alpha
                ),
            ),
        })
        .collect()
}

fn sigma_k(p: &ModeProfile, family: &MatrixFamily, alpha: f64, opts: &BifurcationOptions) -> Result<Vec<IndexTriple>> {
    let spec = family.spectrum_at(alpha, opts.spectral_tol)?;
    Ok(p.sigma0
        .iter()
        .filter(|t| t.m % 2 == 1 && spec.entries[t.j - 1].geom_mult % 2 == 1)
        .copied()
        .collect())
}

pub fn global_report(
    family: &MatrixFamily,
    table: &BesselZeroTable,
    opts: &BifurcationOptions,
) -> Result<GlobalReport> {
    let lambda = find_critical_points(family, table, opts)?;
    let local = lambda
        .iter()
        .map(|cp| local_invariant(family, cp, table, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    for l in &local {
        let complex = l.minus.complex_warnings.max(l.plus.complex_warnings);
        if complex > 0 {
            warnings.push(format!(
                "{complex} non-real eigenvalue(s) ignored near alpha = {}",
                l.alpha
            ));
        }
    }
    for cp in &lambda {
        if cp.crossings.len() > 1 {
            warnings.push(format!(
                "{} simultaneous crossings merged at alpha = {}",
                cp.crossings.len(),
                cp.alpha
            ));
        }
    }
    for w in local.windows(2) {
        if w[0].plus.s_set != w[1].minus.s_set || w[0].plus.n0 % 2 != w[1].minus.n0 % 2 {
            return Err(Error::Consistency(format!(
                "parity data changed between regular points {} and {}; a crossing was missed",
                w[0].bracket.1, w[1].bracket.0
            )));
        }
    }

    let (Some(first), Some(last)) = (local.first(), local.last()) else {
        return Ok(GlobalReport {
            lambda,
            local,
            t_lambda: BTreeMap::new(),
            j_lambda: Vec::new(),
            sum_coeffs: BTreeMap::new(),
            closed_form: BTreeMap::new(),
            closed_form_agrees: true,
            kfixed_certificates: Vec::new(),
            sigma_k_start: Vec::new(),
            sigma_k_end: Vec::new(),
            warnings,
        });
    };
    let (start, end) = (&first.minus, &last.plus);
    let sum_coeffs = normative_difference(start, end, &opts.degree)?;

    let mut telescoped: BTreeMap<u32, i64> = BTreeMap::new();
    for l in &local {
        for (&m0, &c) in &l.coeffs {
            let e = telescoped.entry(m0).or_default();
            *e = e.checked_add(c).ok_or(Error::Overflow)?;
        }
    }
    telescoped.retain(|_, v| *v != 0);
    if telescoped != sum_coeffs {
        return Err(Error::Consistency(format!(
            "sum of local invariants {telescoped:?} differs from the endpoint difference {sum_coeffs:?}"
        )));
    }

    let t_lambda = count_diff(start, end);
    let j_lambda = odd_modes(&t_lambda);
    let closed_form = closed_form_map(&j_lambda, end, &opts.degree)?;
    let interval = (lambda[0].alpha, lambda[lambda.len() - 1].alpha);
    let kfixed_certificates = j_lambda
        .iter()
        .filter(|&&m| m % 2 == 1)
        .map(|&m0| UnboundedCertificate {
            m0,
            interval,
            unbounded: true,
            non_radial: true,
            guarantee: format!(
                "unbounded branch of non-radial solutions with symmetries at least (H_{m0}), branching within [{}, {}]",
                interval.0, interval.1
            ),
        })
        .collect();
    Ok(GlobalReport {
        sigma_k_start: sigma_k(start, family, first.bracket.0, opts)?,
        sigma_k_end: sigma_k(end, family, last.bracket.1, opts)?,
        closed_form_agrees: closed_form == sum_coeffs,
        lambda,
        t_lambda,
        j_lambda,
        sum_coeffs,
        closed_form,
        kfixed_certificates,
        warnings,
        local: Vec::new(),
    }
    .with_local(local))
}

impl GlobalReport {
    fn with_local(mut self, local: Vec<LocalInvariant>) -> Self {
        self.local = local;
        self
    }

    pub fn branch_certificates(&self) -> Vec<BranchCertificate> {
        self.local.iter().flat_map(krasnoselskii_certificates).collect()
    }

    pub fn has_certificates(&self) -> bool {
        !self.kfixed_certificates.is_empty() || self.local.iter().any(|l| !l.coeffs.is_empty())
    }
}

pub fn kfixed_unbounded_certificates(
    family: &MatrixFamily,
    table: &BesselZeroTable,
    opts: &BifurcationOptions,
) -> Result<Vec<UnboundedCertificate>> {
    Ok(global_report(family, table, opts)?.kfixed_certificates)
}

#[derive(Debug, Clone, Serialize)]
struct LocalJson<'a> {
    alpha: f64,
    bracket: (f64, f64),
    #[serde(rename = "J")]
    j: &'a [u32],
    t: &'a BTreeMap<u32, i64>,
    #[serde(rename = "S_minus")]
    s_minus: &'a [u32],
    #[serde(rename = "S_plus")]
    s_plus: &'a [u32],
    coeffs: &'a BTreeMap<u32, i64>,
    closed_form: &'a BTreeMap<u32, i64>,
    closed_form_agrees: bool,
    radial_flip: bool,
}

#[derive(Debug, Clone, Serialize)]
struct GlobalJson<'a> {
    #[serde(rename = "J_Lambda")]
    j_lambda: &'a [u32],
    #[serde(rename = "t_Lambda")]
    t_lambda: &'a BTreeMap<u32, i64>,
    sum_coeffs: &'a BTreeMap<u32, i64>,
    closed_form: &'a BTreeMap<u32, i64>,
    closed_form_agrees: bool,
    #[serde(rename = "sigma_K_start")]
    sigma_k_start: &'a [IndexTriple],
    #[serde(rename = "sigma_K_end")]
    sigma_k_end: &'a [IndexTriple],
}

/// JSON view of a [`GlobalReport`].
#[derive(Debug, Clone, Serialize)]
pub struct BifurcationReportJson<'a> {
    schema: u32,
    domain: (f64, f64),
    critical_points: &'a [CriticalPoint],
    local: Vec<LocalJson<'a>>,
    certificates: Vec<BranchCertificate>,
    global: GlobalJson<'a>,
    unbounded_nonradial: &'a [UnboundedCertificate],
    assumptions_asserted: Vec<String>,
    conditional: bool,
    warnings: &'a [String],
}

impl GlobalReport {
    pub fn to_json_view<'a>(&'a self, domain: (f64, f64), assumptions: &[String]) -> BifurcationReportJson<'a> {
        BifurcationReportJson {
            schema: crate::SCHEMA_VERSION,
            domain,
            critical_points: &self.lambda,
            local: self
                .local
                .iter()
                .map(|l| LocalJson {
                    alpha: l.alpha,
                    bracket: l.bracket,
                    j: &l.j_set,
                    t: &l.t_counts,
                    s_minus: &l.s_minus,
                    s_plus: &l.s_plus,
                    coeffs: &l.coeffs,
                    closed_form: &l.closed_form,
                    closed_form_agrees: l.closed_form_agrees,
                    radial_flip: l.radial_flip,
                })
                .collect(),
            certificates: self.branch_certificates(),
            global: GlobalJson {
                j_lambda: &self.j_lambda,
                t_lambda: &self.t_lambda,
                sum_coeffs: &self.sum_coeffs,
                closed_form: &self.closed_form,
                closed_form_agrees: self.closed_form_agrees,
                sigma_k_start: &self.sigma_k_start,
                sigma_k_end: &self.sigma_k_end,
            },
            unbounded_nonradial: &self.kfixed_certificates,
            assumptions_asserted: assumptions.to_vec(),
            conditional: assumptions.is_empty(),
            warnings: &self.warnings,
        }
    }
}
