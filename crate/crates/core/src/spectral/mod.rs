//! Real spectra of coefficient matrices and the non-degeneracy check against
//! the Dirichlet spectrum of the disc.

mod family;

pub use family::{CurveShape, FamilyKind, MatrixFamily, SpectralCurve};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bessel::BesselZeroTable;
use crate::error::{domain, Error, Result, Violation};

/// Default clustering and rank tolerance, relative to the Frobenius norm.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-9;

/// Default relative guard for the non-degeneracy check.
pub const DEFAULT_GUARD: f64 = 1e-6;

/// A real eigenvalue together with its geometric multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumEntry {
    pub mu: f64,
    #[serde(rename = "mult", alias = "geom_mult")]
    pub geom_mult: u32,
}

impl SpectrumEntry {
    pub fn new(mu: f64, geom_mult: u32) -> Self {
        Self { mu, geom_mult }
    }
}

/// Real spectrum plus the number of eigenvalues dropped for being complex.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpectrumAnalysis {
    pub entries: Vec<SpectrumEntry>,
    pub complex_count: usize,
}

/// Validates user-supplied spectrum entries.
pub fn validate_spectrum(entries: &[SpectrumEntry]) -> Result<()> {
    for (j, e) in entries.iter().enumerate() {
        if !e.mu.is_finite() {
            return Err(domain(format!("eigenvalue {} is not finite", j + 1)));
        }
        if e.geom_mult == 0 {
            return Err(domain(format!("eigenvalue {} has zero multiplicity", j + 1)));
        }
    }
    Ok(())
}

/// JSON matrix `{"n": N, "rows": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.n == 0 {
            return Err(domain("matrix dimension must be positive"));
        }
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(domain(format!("matrix is not {0}x{0}", self.n)));
        }
        let m = DMatrix::from_fn(self.n, self.n, |i, j| self.rows[i][j]);
        if m.iter().any(|v| !v.is_finite()) {
            return Err(domain("matrix has non-finite entries"));
        }
        Ok(m)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            n: m.nrows(),
            rows: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }
}

fn check_square_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(domain(format!(
            "matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Err(domain("matrix must be non-empty"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(domain("matrix has non-finite entries"));
    }
    Ok(())
}

fn scale_of(a: &DMatrix<f64>) -> f64 {
    let norm = a.norm();
    if norm > 0.0 {
        norm
    } else {
        1.0
    }
}

/// Real eigenvalues of `a` (algebraic multiplicity expanded), descending, and
/// the number of non-real eigenvalues.
pub(crate) fn real_eigenvalues(a: &DMatrix<f64>, tol: f64) -> (Vec<f64>, usize) {
    let scale = scale_of(a);
    let eig = a.clone().complex_eigenvalues();
    let mut real = Vec::with_capacity(eig.len());
    let mut complex = 0;
    for z in eig.iter() {
        if z.im.abs() <= tol * scale {
            real.push(z.re);
        } else {
            complex += 1;
        }
    }
    real.sort_by(|x, y| y.total_cmp(x));
    (real, complex)
}

fn numerical_rank(a: &DMatrix<f64>, threshold: f64) -> usize {
    a.singular_values().iter().filter(|&&s| s > threshold).count()
}

/// Real spectrum with geometric multiplicities, in decreasing order of `mu`.
///
/// Eigenvalues within `tol * ||A||` of each other are merged; the merged
/// multiplicity is `N - rank(A - c I)` at the cluster mean `c`, clamped to the
/// cluster size.
pub fn real_spectrum(a: &DMatrix<f64>, tol: f64) -> Result<SpectrumAnalysis> {
    check_square_finite(a)?;
    if !(tol > 0.0) {
        return Err(domain("spectral tolerance must be positive"));
    }
    let n = a.nrows();
    let scale = scale_of(a);
    let (real, complex_count) = real_eigenvalues(a, tol);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for v in real {
        match clusters.last_mut() {
            Some(c) if (c[c.len() - 1] - v).abs() <= tol * scale => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let entries = clusters
        .into_iter()
        .map(|c| {
            let centre = c.iter().sum::<f64>() / c.len() as f64;
            let shifted = a - &identity * centre;
            let nullity = n - numerical_rank(&shifted, tol * scale);
            SpectrumEntry::new(centre, nullity.clamp(1, c.len()) as u32)
        })
        .collect();
    Ok(SpectrumAnalysis { entries, complex_count })
}

/// Triples `(j, m, n)` where `|mu_j - s_{m,n}| <= guard * max(1, |mu_j|)`.
/// An empty list means assumption (D) holds at this guard.
pub fn check_nondegeneracy(spectrum: &[SpectrumEntry], table: &BesselZeroTable, guard: f64) -> Result<Vec<Violation>> {
    if !(guard > 0.0) || !guard.is_finite() {
        return Err(domain("non-degeneracy guard must be positive"));
    }
    validate_spectrum(spectrum)?;
    let mut out = Vec::new();
    for (idx, e) in spectrum.iter().enumerate() {
        let window = guard * e.mu.abs().max(1.0);
        let upper = e.mu + window;
        let Some(top) = table.max_mode_up_to(upper)? else {
            continue;
        };
        for m in 0..=top {
            for (n, s) in table.zeros_up_to(m, upper)? {
                if (s - e.mu).abs() <= window {
                    out.push(Violation {
                        j: idx + 1,
                        m,
                        n,
                        mu: e.mu,
                        eigenvalue: s,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// [`check_nondegeneracy`] turned into an error when violated.
pub fn ensure_nondegenerate(spectrum: &[SpectrumEntry], table: &BesselZeroTable, guard: f64) -> Result<()> {
    let violations = check_nondegeneracy(spectrum, table, guard)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Degenerate(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(a: &DMatrix<f64>) -> Vec<SpectrumEntry> {
        real_spectrum(a, DEFAULT_SPECTRAL_TOL).unwrap().entries
    }

    #[test]
    fn diagonal_spectra() {
        let one = DMatrix::from_row_slice(1, 1, &[6.0]);
        assert_eq!(entries(&one), vec![SpectrumEntry::new(6.0, 1)]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![15.0, 15.0, 2.0]));
        assert_eq!(
            entries(&d),
            vec![SpectrumEntry::new(15.0, 2), SpectrumEntry::new(2.0, 1)]
        );
    }

    #[test]
    fn jordan_block_has_geometric_multiplicity_one() {
        let j = DMatrix::from_row_slice(2, 2, &[5.0, 1.0, 0.0, 5.0]);
        assert_eq!(entries(&j), vec![SpectrumEntry::new(5.0, 1)]);
    }

    #[test]
    fn complex_pairs_are_counted_not_returned() {
        let rot = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 4.0]);
        let s = real_spectrum(&rot, DEFAULT_SPECTRAL_TOL).unwrap();
        assert_eq!(s.complex_count, 2);
        assert_eq!(s.entries.len(), 1);
        assert!((s.entries[0].mu - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(entries(&z), vec![SpectrumEntry::new(0.0, 3)]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let rect = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(real_spectrum(&rect, 1e-9), Err(Error::Domain(_))));
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(real_spectrum(&nan, 1e-9), Err(Error::Domain(_))));
        let json = MatrixJson {
            n: 2,
            rows: vec![vec![1.0, 2.0]],
        };
        assert!(json.to_matrix().is_err());
    }

    #[test]
    fn nondegeneracy_examples() {
        let t = BesselZeroTable::default();
        assert!(check_nondegeneracy(&[SpectrumEntry::new(6.0, 1)], &t, 1e-6)
            .unwrap()
            .is_empty());
        let v = check_nondegeneracy(&[SpectrumEntry::new(5.783185962946785, 1)], &t, 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].j, v[0].m, v[0].n), (1, 0, 1));
        assert!(check_nondegeneracy(&[SpectrumEntry::new(-3.0, 1)], &t, 1e-6)
            .unwrap()
            .is_empty());
        assert!(matches!(
            ensure_nondegenerate(&[SpectrumEntry::new(5.783185962946785, 1)], &t, 1e-6),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn nondegeneracy_reports_every_offending_index() {
        let t = BesselZeroTable::default();
        let s01 = t.laplacian_eigenvalue(0, 1).unwrap();
        let s11 = t.laplacian_eigenvalue(1, 1).unwrap();
        let spec = [
            SpectrumEntry::new(20.0, 1),
            SpectrumEntry::new(s11, 1),
            SpectrumEntry::new(s01, 2),
        ];
        let v: Vec<_> = check_nondegeneracy(&spec, &t, 1e-6)
            .unwrap()
            .into_iter()
            .map(|v| (v.j, v.m, v.n))
            .collect();
        assert_eq!(v, vec![(2, 1, 1), (3, 0, 1)]);
    }

    #[test]
    fn capacity_error_when_table_too_small() {
        let cfg = crate::bessel::TableConfig {
            mode_cap: 2,
            ..Default::default()
        };
        let t = BesselZeroTable::new(cfg);
        let r = check_nondegeneracy(&[SpectrumEntry::new(100.0, 1)], &t, 1e-6);
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }
}
