use equideg::bessel::{bessel_j, BesselZeroTable};
use equideg::spectral::{real_spectrum, SpectrumEntry, DEFAULT_SPECTRAL_TOL};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn similarity_preserves_spectrum(
        diag in prop::collection::vec(-20i32..=20, 1..5),
        entries in prop::collection::vec(-3i32..=3, 25),
    ) {
        let n = diag.len();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(n, diag.iter().map(|&v| f64::from(v))));
        // unit upper triangular, so always invertible
        let p = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => f64::from(entries[i * 5 + j]),
            std::cmp::Ordering::Greater => 0.0,
        });
        let a = &p * &d * p.clone().try_inverse().unwrap();
        let got = real_spectrum(&a, DEFAULT_SPECTRAL_TOL).unwrap();
        let want = real_spectrum(&d, DEFAULT_SPECTRAL_TOL).unwrap();
        prop_assert_eq!(got.entries.len(), want.entries.len());
        for (g, w) in got.entries.iter().zip(&want.entries) {
            prop_assert!((g.mu - w.mu).abs() < 1e-6 * w.mu.abs().max(1.0), "{g:?} vs {w:?}");
            prop_assert_eq!(g.geom_mult, w.geom_mult);
        }
    }

    #[test]
    fn diagonal_multiplicities_are_counts(diag in prop::collection::vec(0u8..4, 1..7)) {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&v| f64::from(v) * 7.0)));
        let s = real_spectrum(&d, DEFAULT_SPECTRAL_TOL).unwrap();
        let total: u32 = s.entries.iter().map(|e| e.geom_mult).sum();
        prop_assert_eq!(total as usize, diag.len());
        for e in &s.entries {
            let count = diag.iter().filter(|&&v| f64::from(v) * 7.0 == e.mu).count();
            prop_assert_eq!(e.geom_mult as usize, count);
        }
    }

    #[test]
    fn zeros_interlace(m in 0u32..40, n in 1u32..20) {
        let t = BesselZeroTable::default();
        let z = t.zero(m, n).unwrap();
        // j_{m,n} < j_{m+1,n} < j_{m,n+1}
        prop_assert!(z < t.zero(m + 1, n).unwrap());
        prop_assert!(t.zero(m + 1, n).unwrap() < t.zero(m, n + 1).unwrap());
        prop_assert!(bessel_j(m, z).abs() < 1e-10);
    }
}

#[test]
fn sorted_descending() {
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 9.0, -4.0, 9.0]));
    let s = real_spectrum(&d, DEFAULT_SPECTRAL_TOL).unwrap();
    assert_eq!(
        s.entries,
        vec![
            SpectrumEntry::new(9.0, 2),
            SpectrumEntry::new(1.0, 1),
            SpectrumEntry::new(-4.0, 1)
        ]
    );
}
