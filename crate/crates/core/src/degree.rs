//! Index sets, parity counts and existence certificates for the Leray-Schauder
//! degree of the linearised operator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bessel::BesselZeroTable;
use crate::burnside::{self, OrbitType};
use crate::caps::DEFAULT_POWERSET_CAP;
use crate::error::{domain, Result};
use crate::spectral::{ensure_nondegenerate, validate_spectrum, SpectrumAnalysis, SpectrumEntry, DEFAULT_GUARD};

/// `(m, n, j)`: Fourier mode, 1-based radial index, 1-based spectrum index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexTriple {
    pub m: u32,
    pub n: u32,
    pub j: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeOptions {
    /// Relative guard of the non-degeneracy check.
    pub guard: f64,
    pub powerset_cap: usize,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_GUARD,
            powerset_cap: DEFAULT_POWERSET_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ModeProfile {
    /// Triples with `s_{m,n} < mu_j`, sorted by `(m, n, j)`.
    pub sigma0: Vec<IndexTriple>,
    /// `n^m`: pairs `(n, j)` in `sigma0` at mode `m` with odd multiplicity.
    /// Modes with a zero count are omitted.
    pub counts: BTreeMap<u32, u64>,
    /// Modes `m >= 1` with odd `n^m`, ascending.
    pub s_set: Vec<u32>,
    pub n0: u64,
    pub complex_warnings: usize,
    /// Largest mode with a Dirichlet eigenvalue below the top of the spectrum.
    pub mode_range: u32,
}

impl ModeProfile {
    pub fn count(&self, m: u32) -> u64 {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    pub fn radial_parity(&self) -> Parity {
        Parity::of(self.n0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Self {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Builds the profile of an explicit spectrum after checking non-degeneracy.
pub fn build_profile(spectrum: &[SpectrumEntry], table: &BesselZeroTable, opts: &DegreeOptions) -> Result<ModeProfile> {
    ensure_nondegenerate(spectrum, table, opts.guard)?;
    profile_unchecked(spectrum, table)
}

/// [`build_profile`] for a computed spectrum, carrying its complex-eigenvalue count.
pub fn build_profile_from_analysis(
    analysis: &SpectrumAnalysis,
    table: &BesselZeroTable,
    opts: &DegreeOptions,
) -> Result<ModeProfile> {
    let mut p = build_profile(&analysis.entries, table, opts)?;
    p.complex_warnings = analysis.complex_count;
    Ok(p)
}

pub(crate) fn profile_unchecked(spectrum: &[SpectrumEntry], table: &BesselZeroTable) -> Result<ModeProfile> {
    validate_spectrum(spectrum)?;
    let mut sigma0 = Vec::new();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut mode_range = 0;
    for (idx, e) in spectrum.iter().enumerate() {
        let Some(top) = table.max_mode(e.mu)? else {
            continue;
        };
        mode_range = mode_range.max(top);
        for m in 0..=top {
            let below = table.zeros_below(m, e.mu)?;
            if e.geom_mult % 2 == 1 && !below.is_empty() {
                *counts.entry(m).or_default() += below.len() as u64;
            }
            sigma0.extend(below.into_iter().map(|(n, _)| IndexTriple { m, n, j: idx + 1 }));
        }
    }
    sigma0.sort_unstable();
    let s_set = counts
        .iter()
        .filter(|&(&m, &c)| m >= 1 && c % 2 == 1)
        .map(|(&m, _)| m)
        .collect();
    let n0 = counts.get(&0).copied().unwrap_or(0);
    Ok(ModeProfile {
        sigma0,
        counts,
        s_set,
        n0,
        complex_warnings: 0,
        mode_range,
    })
}

/// Coefficient of `(H_{m0})` in the degree described by `profile`.
pub fn degree_coeff(profile: &ModeProfile, m0: u32, opts: &DegreeOptions) -> Result<i64> {
    burnside::closed_form_coeff_capped(&profile.s_set, m0, opts.powerset_cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub m0: u32,
    pub coeff: i64,
    pub orbit_type: String,
    pub guarantee: String,
}

impl Certificate {
    pub(crate) fn new(m0: u32, coeff: i64, guarantee: String) -> Self {
        Self {
            m0,
            coeff,
            orbit_type: OrbitType::Dihedral(m0).label(),
            guarantee,
        }
    }
}

/// Every `m0` with a nonzero `(H_{m0})` coefficient in `1..=max(S)`, which
/// contains every gcd of a subset of `S`; all other coefficients vanish.
pub fn nonzero_coefficients(profile: &ModeProfile, opts: &DegreeOptions) -> Result<BTreeMap<u32, i64>> {
    let mut out = BTreeMap::new();
    let top = profile.s_set.last().copied().unwrap_or(0);
    for m0 in 1..=top {
        let c = degree_coeff(profile, m0, opts)?;
        if c != 0 {
            out.insert(m0, c);
        }
    }
    Ok(out)
}

pub fn certificates_for(profile: &ModeProfile, opts: &DegreeOptions) -> Result<Vec<Certificate>> {
    Ok(nonzero_coefficients(profile, opts)?
        .into_iter()
        .map(|(m0, c)| Certificate::new(m0, c, format!("non-trivial solution with (G_u) >= (H_{m0})")))
        .collect())
}

pub fn existence_certificates(
    spectrum: &[SpectrumEntry],
    table: &BesselZeroTable,
    opts: &DegreeOptions,
) -> Result<Vec<Certificate>> {
    certificates_for(&build_profile(spectrum, table, opts)?, opts)
}

/// Direct count: an odd number of eigenvalues with odd multiplicity lying
/// above an odd number of the `s_{m,n}`.
pub fn has_odd_mode_count(
    spectrum: &[SpectrumEntry],
    table: &BesselZeroTable,
    m: u32,
    opts: &DegreeOptions,
) -> Result<bool> {
    if m == 0 {
        return Err(domain("the predicate is defined for modes m >= 1"));
    }
    ensure_nondegenerate(spectrum, table, opts.guard)?;
    let mut qualifying = 0_usize;
    for e in spectrum.iter().filter(|e| e.geom_mult % 2 == 1) {
        if table.zeros_below(m, e.mu)?.len() % 2 == 1 {
            qualifying += 1;
        }
    }
    Ok(qualifying % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceReport {
    pub schema: u32,
    pub spectrum: Vec<SpectrumEntry>,
    pub complex_eigenvalues: usize,
    pub sigma0: Vec<IndexTriple>,
    pub counts: BTreeMap<u32, u64>,
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    pub mode_range: u32,
    pub certificates: Vec<Certificate>,
    pub radial_indicator: Parity,
    pub assumptions_asserted: Vec<String>,
    /// True when the analytic hypotheses were not asserted by the caller.
    pub conditional: bool,
}

pub fn existence_report(
    analysis: &SpectrumAnalysis,
    table: &BesselZeroTable,
    opts: &DegreeOptions,
    assumptions: &[String],
) -> Result<ExistenceReport> {
    let profile = build_profile_from_analysis(analysis, table, opts)?;
    let certificates = certificates_for(&profile, opts)?;
    Ok(ExistenceReport {
        schema: crate::SCHEMA_VERSION,
        spectrum: analysis.entries.clone(),
        complex_eigenvalues: profile.complex_warnings,
        radial_indicator: profile.radial_parity(),
        sigma0: profile.sigma0,
        counts: profile.counts,
        s: profile.s_set,
        mode_range: profile.mode_range,
        certificates,
        assumptions_asserted: assumptions.to_vec(),
        conditional: assumptions.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn spec(v: &[(f64, u32)]) -> Vec<SpectrumEntry> {
        v.iter().map(|&(mu, k)| SpectrumEntry::new(mu, k)).collect()
    }

    fn profile(v: &[(f64, u32)]) -> ModeProfile {
        build_profile(&spec(v), &BesselZeroTable::default(), &DegreeOptions::default()).unwrap()
    }

    fn t(m: u32, n: u32, j: usize) -> IndexTriple {
        IndexTriple { m, n, j }
    }

    #[test]
    fn profile_examples() {
        let p = profile(&[(6.0, 1)]);
        assert_eq!(p.sigma0, vec![t(0, 1, 1)]);
        assert_eq!((p.n0, p.s_set.clone()), (1, vec![]));

        let p = profile(&[(15.0, 1)]);
        assert_eq!(p.sigma0, vec![t(0, 1, 1), t(1, 1, 1)]);
        assert_eq!((p.n0, p.s_set.clone()), (1, vec![1]));

        let p = profile(&[(15.0, 2)]);
        assert_eq!(p.sigma0, vec![t(0, 1, 1), t(1, 1, 1)]);
        assert!(p.counts.is_empty());
        assert!(p.s_set.is_empty());
    }

    #[test]
    fn coefficient_examples() {
        let o = DegreeOptions::default();
        assert_eq!(degree_coeff(&profile(&[(15.0, 1)]), 1, &o).unwrap(), -1);
        for m0 in 1..6 {
            assert_eq!(degree_coeff(&profile(&[(6.0, 1)]), m0, &o).unwrap(), 0);
        }
        let p = ModeProfile {
            s_set: vec![1, 2, 3],
            ..Default::default()
        };
        assert_eq!(degree_coeff(&p, 1, &o).unwrap(), 1);
    }

    #[test]
    fn certificates_examples() {
        let t = BesselZeroTable::default();
        let o = DegreeOptions::default();
        let c = existence_certificates(&spec(&[(15.0, 1)]), &t, &o).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].m0, c[0].coeff), (1, -1));
        assert!(existence_certificates(&spec(&[(6.0, 1)]), &t, &o).unwrap().is_empty());
        assert_eq!(profile(&[(6.0, 1)]).radial_parity(), Parity::Odd);
        let empty = profile(&[]);
        assert!(certificates_for(&empty, &o).unwrap().is_empty());
        assert_eq!(empty.radial_parity(), Parity::Even);
    }

    #[test]
    fn predicate_examples() {
        let t = BesselZeroTable::default();
        let o = DegreeOptions::default();
        assert!(has_odd_mode_count(&spec(&[(15.0, 1)]), &t, 1, &o).unwrap());
        assert!(!has_odd_mode_count(&spec(&[(15.0, 1)]), &t, 2, &o).unwrap());
        assert!(!has_odd_mode_count(&spec(&[(15.0, 1), (16.0, 1)]), &t, 1, &o).unwrap());
    }

    #[test]
    fn degenerate_spectrum_refused() {
        let t = BesselZeroTable::default();
        let s01 = t.laplacian_eigenvalue(0, 1).unwrap();
        let r = build_profile(&spec(&[(s01, 1)]), &t, &DegreeOptions::default());
        assert!(matches!(r, Err(Error::Degenerate(v)) if v.len() == 1));
    }

    #[test]
    fn report_json_keys() {
        let t = BesselZeroTable::default();
        let analysis = SpectrumAnalysis {
            entries: spec(&[(15.0, 1)]),
            complex_count: 0,
        };
        let r = existence_report(&analysis, &t, &DegreeOptions::default(), &[]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "spectrum",
            "sigma0",
            "counts",
            "S",
            "certificates",
            "radial_indicator",
            "assumptions_asserted",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["schema"], 1);
        assert_eq!(v["radial_indicator"], "odd");
        assert_eq!(v["certificates"][0]["orbit_type"], "D_{2}^{D_{1}}x^{Z1}Z2");
    }
}
