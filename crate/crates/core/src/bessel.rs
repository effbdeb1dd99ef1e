//! Bessel functions of the first kind and the Dirichlet spectrum of the unit disc.
//!
//! The Dirichlet Laplacian on the unit disc has eigenvalues `s_{m,n} = j_{m,n}^2`
//! where `j_{m,n}` is the `n`-th positive zero of `J_m`. Zeros are located by a
//! sign-change scan on a fixed grid starting at `x = m` (every positive zero of
//! `J_m` exceeds `m`), followed by bisection down to the table tolerance. The
//! scan step is well below the minimum spacing of consecutive zeros (> 3.1), so
//! no zero is skipped and the index `n` is exact.

use std::collections::BTreeMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::caps::{Caps, DEFAULT_MODE_CAP};
use crate::error::{domain, Error, Result};

/// Absolute width of the bisection bracket around each stored zero.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-13;

const SCAN_STEP: f64 = 0.5;
const SERIES_MAX_ARG: f64 = 4.0;
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;

/// `J_m(x)` for `x >= 0`, without any cap or domain validation.
///
/// Small arguments use the ascending series; everything else uses Miller's
/// backward recurrence normalised by `J_0 + 2 * sum J_{2k} = 1`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mf = f64::from(m);
    if x <= SERIES_MAX_ARG || 0.25 * x * x < mf + 1.0 {
        series(m, x)
    } else {
        miller(m, x)
    }
}

/// Checked evaluation against the default mode cap.
pub fn eval_bessel_j(m: u32, x: f64) -> Result<f64> {
    check_eval(m, x, DEFAULT_MODE_CAP)?;
    Ok(bessel_j(m, x))
}

fn check_eval(m: u32, x: f64, mode_cap: u32) -> Result<()> {
    if m > mode_cap {
        return Err(Error::Capacity {
            what: "Bessel mode",
            limit: mode_cap as usize,
        });
    }
    if !x.is_finite() {
        return Err(domain(format!("Bessel argument must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(domain(format!("Bessel argument must be non-negative, got {x}")));
    }
    Ok(())
}

fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^m / m!, built multiplicatively to stay in range
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / f64::from(k);
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    let mf = f64::from(m);
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + mf));
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn miller(m: u32, x: f64) -> f64 {
    let order = (m as usize).max(x.ceil() as usize);
    let mut start = order + 20 + (60.0 * order as f64).sqrt() as usize;
    start += start % 2;
    let tox = 2.0 / x;
    let (mut bjp, mut bj) = (0.0_f64, 1.0_f64);
    let mut ans = 0.0;
    let mut sum = 0.0;
    let mut even = false;
    for j in (1..=start).rev() {
        let bjm = j as f64 * tox * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > RESCALE_ABOVE {
            bj *= RESCALE_BY;
            bjp *= RESCALE_BY;
            ans *= RESCALE_BY;
            sum *= RESCALE_BY;
        }
        if even {
            sum += bj;
        }
        even = !even;
        if j == m as usize {
            ans = bjp;
        }
    }
    // bj now holds the unnormalised J_0
    let norm = 2.0 * sum - bj;
    if m == 0 {
        bj / norm
    } else {
        ans / norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableConfig {
    pub mode_cap: u32,
    pub index_cap: u32,
    pub tolerance: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        let caps = Caps::default();
        Self {
            mode_cap: caps.mode,
            index_cap: caps.index,
            tolerance: DEFAULT_ZERO_TOLERANCE,
        }
    }
}

impl TableConfig {
    pub fn from_caps(caps: &Caps) -> Self {
        Self {
            mode_cap: caps.mode,
            index_cap: caps.index,
            ..Self::default()
        }
    }
}

/// One `(m, n)` entry as it appears in the JSON dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroRecord {
    pub m: u32,
    pub n: u32,
    pub zero: f64,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, Default)]
struct ModeZeros {
    zeros: Vec<f64>,
    /// Index of the next scan cell `[m + k*h, m + (k+1)*h]` to inspect.
    next_cell: u64,
}

/// Memoised zeros `j_{m,n}` and eigenvalues `s_{m,n} = j_{m,n}^2`.
///
/// Lookups fill the cache on demand under a write lock. The fill is a pure
/// function of `(m, n, config)`, so concurrent readers observe the same values
/// whichever thread computed them.
#[derive(Debug)]
pub struct BesselZeroTable {
    config: TableConfig,
    modes: RwLock<BTreeMap<u32, ModeZeros>>,
}

impl Default for BesselZeroTable {
    fn default() -> Self {
        Self::new(TableConfig::default())
    }
}

impl Clone for BesselZeroTable {
    fn clone(&self) -> Self {
        let modes = self.modes.read().expect("zero table lock poisoned").clone();
        Self {
            config: self.config,
            modes: RwLock::new(modes),
        }
    }
}

impl BesselZeroTable {
    pub fn new(config: TableConfig) -> Self {
        Self {
            config,
            modes: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn config(&self) -> &TableConfig {
        &self.config
    }

    pub fn tolerance(&self) -> f64 {
        self.config.tolerance
    }

    /// `J_m(x)` checked against this table's mode cap.
    pub fn eval(&self, m: u32, x: f64) -> Result<f64> {
        check_eval(m, x, self.config.mode_cap)?;
        Ok(bessel_j(m, x))
    }

    /// The `n`-th positive zero of `J_m` (`n >= 1`).
    pub fn zero(&self, m: u32, n: u32) -> Result<f64> {
        self.check_index(m, n)?;
        let idx = (n - 1) as usize;
        if let Some(z) = self
            .modes
            .read()
            .expect("zero table lock poisoned")
            .get(&m)
            .and_then(|mz| mz.zeros.get(idx).copied())
        {
            return Ok(z);
        }
        let mut modes = self.modes.write().expect("zero table lock poisoned");
        let entry = modes.entry(m).or_default();
        while entry.zeros.len() <= idx {
            let z = next_zero(m, entry, self.config.tolerance);
            entry.zeros.push(z);
        }
        Ok(entry.zeros[idx])
    }

    pub fn laplacian_eigenvalue(&self, m: u32, n: u32) -> Result<f64> {
        let z = self.zero(m, n)?;
        Ok(z * z)
    }

    /// All `(n, s_{m,n})` with `s_{m,n} < bound`, in increasing `n`.
    pub fn zeros_below(&self, m: u32, bound: f64) -> Result<Vec<(u32, f64)>> {
        self.collect_while(m, bound, |s, b| s < b)
    }

    /// Like [`zeros_below`](Self::zeros_below) but keeps `s_{m,n} == bound`.
    pub fn zeros_up_to(&self, m: u32, bound: f64) -> Result<Vec<(u32, f64)>> {
        self.collect_while(m, bound, |s, b| s <= b)
    }

    fn collect_while(&self, m: u32, bound: f64, keep: impl Fn(f64, f64) -> bool) -> Result<Vec<(u32, f64)>> {
        if !bound.is_finite() {
            return Err(domain(format!("spectral bound must be finite, got {bound}")));
        }
        if m > self.config.mode_cap {
            return Err(Error::Capacity {
                what: "Bessel mode",
                limit: self.config.mode_cap as usize,
            });
        }
        let mut out = Vec::new();
        // j_{m,1} > m, so nothing to find below m^2
        if bound <= 0.0 || (m > 0 && !keep(f64::from(m) * f64::from(m), bound)) {
            return Ok(out);
        }
        let mut n = 1;
        loop {
            let s = self.laplacian_eigenvalue(m, n)?;
            if !keep(s, bound) {
                break;
            }
            out.push((n, s));
            n += 1;
        }
        Ok(out)
    }

    /// Largest `m` with `s_{m,1} < bound`, or `None` when `s_{0,1} >= bound`.
    ///
    /// Relies on `j_{m,1}` increasing in `m`.
    pub fn max_mode(&self, bound: f64) -> Result<Option<u32>> {
        self.max_mode_by(bound, |s, b| s < b)
    }

    pub(crate) fn max_mode_up_to(&self, bound: f64) -> Result<Option<u32>> {
        self.max_mode_by(bound, |s, b| s <= b)
    }

    fn max_mode_by(&self, bound: f64, keep: impl Fn(f64, f64) -> bool) -> Result<Option<u32>> {
        if !bound.is_finite() {
            return Err(domain(format!("spectral bound must be finite, got {bound}")));
        }
        let mut best = None;
        let mut m = 0;
        loop {
            if m > 0 && !keep(f64::from(m) * f64::from(m), bound) {
                break;
            }
            if m > self.config.mode_cap {
                return Err(Error::Capacity {
                    what: "Bessel mode",
                    limit: self.config.mode_cap as usize,
                });
            }
            if !keep(self.laplacian_eigenvalue(m, 1)?, bound) {
                break;
            }
            best = Some(m);
            m += 1;
        }
        Ok(best)
    }

    /// Fills every `(m, n)` with `s_{m,n} < bound`.
    pub fn prefill_below(&self, bound: f64) -> Result<()> {
        if let Some(top) = self.max_mode(bound)? {
            for m in 0..=top {
                self.zeros_below(m, bound)?;
            }
        }
        Ok(())
    }

    /// Cached entries sorted by `(m, n)`.
    pub fn records(&self) -> Vec<ZeroRecord> {
        let modes = self.modes.read().expect("zero table lock poisoned");
        modes
            .iter()
            .flat_map(|(&m, mz)| {
                mz.zeros.iter().enumerate().map(move |(i, &z)| ZeroRecord {
                    m,
                    n: i as u32 + 1,
                    zero: z,
                    eigenvalue: z * z,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records())?)
    }

    /// Rebuilds a table from dumped records, validating each one.
    ///
    /// Per mode the indices must run `1..=k` without gaps, zeros must
    /// increase, eigenvalues must equal the stored zero squared, and `J_m`
    /// must change sign within `tolerance` of every zero.
    pub fn from_records(config: TableConfig, records: &[ZeroRecord]) -> Result<Self> {
        let mut sorted = records.to_vec();
        sorted.sort_by_key(|r| (r.m, r.n));
        let mut modes: BTreeMap<u32, ModeZeros> = BTreeMap::new();
        for r in &sorted {
            if r.m > config.mode_cap || r.n == 0 || r.n > config.index_cap {
                return Err(Error::Schema(format!(
                    "zero record ({}, {}) is outside the configured caps",
                    r.m, r.n
                )));
            }
            let mz = modes.entry(r.m).or_default();
            if mz.zeros.len() + 1 != r.n as usize {
                return Err(Error::Schema(format!(
                    "zero records for mode {} are not contiguous at n = {}",
                    r.m, r.n
                )));
            }
            if let Some(&prev) = mz.zeros.last() {
                if r.zero <= prev {
                    return Err(Error::Schema(format!(
                        "zeros of mode {} are not increasing at n = {}",
                        r.m, r.n
                    )));
                }
            }
            if r.eigenvalue != r.zero * r.zero {
                return Err(Error::Schema(format!(
                    "eigenvalue of ({}, {}) is not the square of the zero",
                    r.m, r.n
                )));
            }
            let lo = bessel_j(r.m, (r.zero - config.tolerance).max(0.0));
            let hi = bessel_j(r.m, r.zero + config.tolerance);
            if (lo > 0.0) == (hi > 0.0) {
                return Err(Error::Schema(format!(
                    "no sign change of J_{} within tolerance of {}",
                    r.m, r.zero
                )));
            }
            mz.zeros.push(r.zero);
        }
        for (&m, mz) in modes.iter_mut() {
            let last = *mz.zeros.last().expect("modes are only created with a zero");
            mz.next_cell = ((last - f64::from(m)) / SCAN_STEP).floor() as u64 + 1;
        }
        Ok(Self {
            config,
            modes: RwLock::new(modes),
        })
    }

    pub fn from_json(config: TableConfig, json: &str) -> Result<Self> {
        let records: Vec<ZeroRecord> = serde_json::from_str(json)?;
        Self::from_records(config, &records)
    }

    fn check_index(&self, m: u32, n: u32) -> Result<()> {
        if m > self.config.mode_cap {
            return Err(Error::Capacity {
                what: "Bessel mode",
                limit: self.config.mode_cap as usize,
            });
        }
        if n == 0 {
            return Err(domain("zero index n starts at 1"));
        }
        if n > self.config.index_cap {
            return Err(Error::Capacity {
                what: "Bessel zero index",
                limit: self.config.index_cap as usize,
            });
        }
        Ok(())
    }
}

fn next_zero(m: u32, state: &mut ModeZeros, tol: f64) -> f64 {
    let origin = f64::from(m);
    let grid = |k: u64| origin + k as f64 * SCAN_STEP;
    loop {
        let a = grid(state.next_cell);
        let b = grid(state.next_cell + 1);
        state.next_cell += 1;
        let pa = bessel_j(m, a) > 0.0;
        let pb = bessel_j(m, b) > 0.0;
        if pa != pb {
            return bisect_sign(m, a, b, pa, tol);
        }
    }
}

fn bisect_sign(m: u32, mut lo: f64, mut hi: f64, lo_positive: bool, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (bessel_j(m, mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
