//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use equideg::bessel::BesselZeroTable;
use equideg::bifurcation::{global_report, BifurcationOptions, GlobalReport};
use equideg::burnside::{
    basic_degree, closed_form_coeff, expand_product, multiply, product_of_basic_degrees, OrbitType,
};
use equideg::degree::{existence_certificates, DegreeOptions};
use equideg::spectral::{
    check_nondegeneracy, MatrixFamily, SpectralCurve, SpectrumEntry, DEFAULT_GUARD, DEFAULT_SPECTRAL_TOL,
};
use equideg::Error;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

// ---------------------------------------------------------------------------
// 1. Bessel zeros against a plain power-series evaluator and bisection.

fn series_j(m: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = 1.0;
    for k in 1..=m {
        term *= h / f64::from(k);
    }
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for k in 0..200 {
        // Kahan summation keeps the cancellation error near one ulp of the largest term
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let k = f64::from(k + 1);
        term *= -h * h / (k * (k + f64::from(m)));
        if term.abs() < 1e-30 {
            break;
        }
    }
    sum
}

fn oracle_zeros(m: u32, count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = 0.05;
    let step = 0.05;
    while out.len() < count {
        let b = a + step;
        let (fa, fb) = (series_j(m, a), series_j(m, b));
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = series_j(m, mid);
                if fm * flo > 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let table = BesselZeroTable::default();
    let mut worst = 0.0_f64;
    let mut ok = true;
    for m in 0..=3 {
        let oracle = oracle_zeros(m, 3);
        for n in 1..=3 {
            let z = table.zero(m, n).unwrap();
            let err = (z - oracle[n as usize - 1]).abs();
            worst = worst.max(err);
            ok &= err <= 1e-10;
        }
    }
    let j01 = table.zero(0, 1).unwrap();
    let j01_err = (j01 - 2.404825557695773).abs();
    ok &= j01_err <= 1e-10;
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "12 zeros, max |err| = {worst:.2e} (limit 1e-10), j01 = {j01} (|err| {j01_err:.2e}), {}",
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Closed form against iterated multiplication on small mode sets.

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut sets = 0usize;
    let mut nonempty_upto5 = 0usize;
    let mut mismatches = Vec::new();
    for mask in 0u32..(1 << 12) {
        let modes: Vec<u32> = (1..=12).filter(|&m| mask & (1 << (m - 1)) != 0).collect();
        if modes.len() > 6 {
            continue;
        }
        sets += 1;
        if (1..=5).contains(&modes.len()) {
            nonempty_upto5 += 1;
        }
        let product = product_of_basic_degrees(&modes).unwrap();
        for m0 in 1..=12 {
            let iterated = product.coeff(OrbitType::Dihedral(m0));
            let closed = closed_form_coeff(&modes, m0).unwrap();
            if iterated != closed && mismatches.len() < 5 {
                mismatches.push((modes.clone(), m0, closed, iterated));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches.is_empty() && elapsed < Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "{sets} sets with |M| <= 6 (includes the {nonempty_upto5} non-empty sets with |M| <= 5) x 12 values of m0, {} mismatches, {}",
            mismatches.len(),
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Basic degrees square to the identity.

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    for m in 1..=50u32 {
        let expanded = expand_product(&[m, m]).unwrap();
        let squared = multiply(&basic_degree(m), &basic_degree(m)).unwrap();
        if !expanded.is_unit() || !squared.is_unit() {
            bad.push(m);
        }
    }
    outcome(
        bad.is_empty(),
        format!("m = 1..=50, both expansion and direct square equal (G); failures {bad:?}"),
    )
}

// ---------------------------------------------------------------------------
// 4. Existence certificates for single-eigenvalue spectra.

fn criterion_4() -> Outcome {
    let t = BesselZeroTable::default();
    let o = DegreeOptions::default();
    let certs = |mu: f64, k: u32| existence_certificates(&[SpectrumEntry::new(mu, k)], &t, &o).unwrap();
    let a = certs(15.0, 1);
    let b = certs(6.0, 1);
    let c = certs(15.0, 2);
    let ok = a.len() == 1 && a[0].m0 == 1 && a[0].coeff == -1 && b.is_empty() && c.is_empty();
    let show = |v: &[equideg::degree::Certificate]| {
        v.iter()
            .map(|c| format!("(m0 {}, coeff {})", c.m0, c.coeff))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcome(
        ok,
        format!(
            "mu=15 mult 1 -> [{}]; mu=6 mult 1 -> [{}]; mu=15 mult 2 -> [{}]",
            show(&a),
            show(&b),
            show(&c)
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. The identity line mu(alpha) = alpha on [0, 20].

fn negated(m: &BTreeMap<u32, i64>) -> BTreeMap<u32, i64> {
    m.iter().map(|(&k, &v)| (k, -v)).collect()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let t = BesselZeroTable::default();
    let o = BifurcationOptions::default();
    let f = MatrixFamily::affine(
        DMatrix::from_element(1, 1, 0.0),
        DMatrix::from_element(1, 1, 1.0),
        (0.0, 20.0),
    )
    .unwrap();
    let r = global_report(&f, &t, &o).unwrap();
    let rev = global_report(&f.reversed(), &t, &o).unwrap();
    let s01 = t.laplacian_eigenvalue(0, 1).unwrap();
    let s11 = t.laplacian_eigenvalue(1, 1).unwrap();
    let alphas: Vec<f64> = r.lambda.iter().map(|c| c.alpha).collect();
    let located = alphas.len() == 2 && (alphas[0] - s01).abs() < 1e-8 && (alphas[1] - s11).abs() < 1e-8;
    let certs = r.branch_certificates();
    let local_ok =
        certs.len() == 1 && certs[0].cert.m0 == 1 && certs[0].cert.coeff == 1 && (certs[0].alpha - s11).abs() < 1e-8;
    let unbounded_ok = r.kfixed_certificates.len() == 1 && r.kfixed_certificates[0].m0 == 1;
    let reversed_ok = rev.lambda.len() == r.lambda.len()
        && rev.sum_coeffs == negated(&r.sum_coeffs)
        && r.local
            .iter()
            .zip(rev.local.iter().rev())
            .all(|(a, b)| b.coeffs == negated(&a.coeffs));
    let elapsed = start.elapsed();
    let ok = located && local_ok && unbounded_ok && reversed_ok && elapsed < Duration::from_secs(5);
    outcome(
        ok,
        format!(
            "critical alphas {:?} (errors {:.1e}, {:.1e}); local certificates {:?}; unbounded m0 {:?}; reversed sums {:?} vs {:?}; {}",
            alphas,
            alphas.first().map_or(f64::NAN, |a| (a - s01).abs()),
            alphas.get(1).map_or(f64::NAN, |a| (a - s11).abs()),
            certs.iter().map(|c| (c.cert.m0, c.cert.coeff)).collect::<Vec<_>>(),
            r.kfixed_certificates.iter().map(|c| c.m0).collect::<Vec<_>>(),
            rev.sum_coeffs,
            r.sum_coeffs,
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Random piecewise-linear families: telescoping and split consistency.

fn random_family(rng: &mut ChaCha8Rng) -> MatrixFamily {
    let branches = rng.random_range(1..=4);
    let curves = (0..branches)
        .map(|_| {
            let interior = rng.random_range(0..=3);
            let mut alphas: Vec<f64> = (0..interior).map(|_| rng.random_range(0.5..49.5)).collect();
            alphas.sort_by(f64::total_cmp);
            alphas.dedup();
            let mut knots = vec![(0.0, rng.random_range(0.0..60.0))];
            knots.extend(alphas.into_iter().map(|a| (a, rng.random_range(0.0..60.0))));
            knots.push((50.0, rng.random_range(0.0..60.0)));
            let mult = [1, 1, 1, 2, 3][rng.random_range(0..5)];
            SpectralCurve::piecewise(mult, knots)
        })
        .collect();
    MatrixFamily::curves(curves, (0.0, 50.0)).unwrap()
}

fn add(a: &BTreeMap<u32, i64>, b: &BTreeMap<u32, i64>) -> BTreeMap<u32, i64> {
    let mut out = a.clone();
    for (&k, &v) in b {
        *out.entry(k).or_default() += v;
    }
    out.retain(|_, v| *v != 0);
    out
}

fn regular_cut(f: &MatrixFamily, t: &BesselZeroTable, r: &GlobalReport, rng: &mut ChaCha8Rng) -> Option<f64> {
    for _ in 0..100 {
        let at = rng.random_range(1.0..49.0);
        let spec = f.spectrum_at(at, DEFAULT_SPECTRAL_TOL).ok()?;
        // brackets nearly tile the interval, so only distance from each critical point matters
        let clear = r.lambda.iter().all(|c| (at - c.alpha).abs() > 1e-3);
        if clear && check_nondegeneracy(&spec.entries, t, DEFAULT_GUARD).ok()?.is_empty() {
            return Some(at);
        }
    }
    None
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let t = BesselZeroTable::default();
    let o = BifurcationOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let (mut accepted, mut redrawn) = (0usize, 0usize);
    let (mut critical, mut local_agree, mut local_disagree) = (0usize, 0usize, 0usize);
    // disagreements where no mode is odd on both sides of the critical point
    let mut disjoint_disagree = 0usize;
    let (mut global_agree, mut global_disagree) = (0usize, 0usize);
    let mut failures: Vec<String> = Vec::new();
    while accepted < 100 {
        let f = random_family(&mut rng);
        let r = match global_report(&f, &t, &o) {
            Ok(r) => r,
            Err(Error::NonIsolated { .. }) => {
                redrawn += 1;
                continue;
            }
            Err(e) => {
                failures.push(format!("family {accepted}: {e}"));
                accepted += 1;
                continue;
            }
        };
        accepted += 1;
        critical += r.lambda.len();
        let telescoped = r.local.iter().fold(BTreeMap::new(), |acc, l| add(&acc, &l.coeffs));
        if telescoped != r.sum_coeffs {
            failures.push(format!(
                "family {accepted}: telescoping {telescoped:?} vs {:?}",
                r.sum_coeffs
            ));
        }
        for l in &r.local {
            if l.closed_form_agrees {
                local_agree += 1;
            } else {
                local_disagree += 1;
                if l.s_minus.iter().all(|m| l.s_plus.binary_search(m).is_err()) {
                    disjoint_disagree += 1;
                }
            }
        }
        if r.closed_form_agrees {
            global_agree += 1;
        } else {
            global_disagree += 1;
        }
        let Some(cut) = regular_cut(&f, &t, &r, &mut rng) else {
            failures.push(format!("family {accepted}: no regular cut point found"));
            continue;
        };
        let halves = (
            global_report(&f.restricted(0.0, cut).unwrap(), &t, &o),
            global_report(&f.restricted(cut, 50.0).unwrap(), &t, &o),
        );
        match halves {
            (Ok(a), Ok(b)) => {
                if add(&a.sum_coeffs, &b.sum_coeffs) != r.sum_coeffs {
                    failures.push(format!(
                        "family {accepted}: split at {cut} gives {:?} + {:?} vs {:?}",
                        a.sum_coeffs, b.sum_coeffs, r.sum_coeffs
                    ));
                }
            }
            (a, b) => failures.push(format!(
                "family {accepted}: split at {cut} failed ({:?}, {:?})",
                a.err().map(|e| e.to_string()),
                b.err().map(|e| e.to_string())
            )),
        }
    }
    let elapsed = start.elapsed();
    let mut detail = format!(
        "100 families ({redrawn} redrawn as non-isolated), {critical} critical points; telescoping and split/merge failures {}; closed form vs difference: local {local_agree} agree / {local_disagree} disagree ({disjoint_disagree} of those with S(-) and S(+) disjoint), global {global_agree} agree / {global_disagree} disagree; {}",
        failures.len(),
        secs(elapsed)
    );
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    outcome(failures.is_empty(), detail)
}

// ---------------------------------------------------------------------------
// 7. Coefficients at members of M are odd.

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut even = Vec::new();
    for _ in 0..500 {
        let size = rng.random_range(1..=10);
        let mut modes: Vec<u32> = (0..size).map(|_| rng.random_range(1..=64)).collect();
        modes.sort_unstable();
        modes.dedup();
        let m0 = modes[rng.random_range(0..modes.len())];
        let c = closed_form_coeff(&modes, m0).unwrap();
        if c.rem_euclid(2) != 1 && even.len() < 5 {
            even.push((modes, m0, c));
        }
    }
    outcome(
        even.is_empty(),
        format!("500 random (M, m0 in M) with |M| <= 10, modes <= 64; even coefficients {even:?}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("Bessel zeros match the series oracle", criterion_1),
        ("Burnside closed form equals iterated multiplication", criterion_2),
        ("basic degrees are involutions", criterion_3),
        ("existence certificates for one-eigenvalue spectra", criterion_4),
        ("identity-line bifurcation and reversal", criterion_5),
        (
            "random families: telescoping, split/merge, closed-form status",
            criterion_6,
        ),
        ("coefficients at members of M are odd", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "acceptance {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
