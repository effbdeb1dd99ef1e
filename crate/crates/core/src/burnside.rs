//! Exact arithmetic on the tracked part of the Burnside ring `A(O(2) x Z_2)`.
//!
//! Only three kinds of orbit types are carried: the unit `(G)`, the radial
//! type `(O(2) x Z_1)` and the maximal amalgamated types
//! `(H_m) = (D_{2m} ^{D_m}x^{Z_1} Z_2)` for `m >= 1`. The product rule on these is
//!
//! ```text
//! (G) . x = x
//! (H_m) . (H_m') = 2 (H_gcd(m,m'))   if B({m, m'})
//!                = 0 on every (H_s)  otherwise
//! ```
//!
//! where `B(I)` holds when every pair `x, y` in `I` has `(x + y) / gcd(x, y)` or
//! `(x - y) / gcd(x, y)` even.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::DEFAULT_POWERSET_CAP;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitType {
    /// `(G)`, the ring identity.
    Unit,
    /// `(O(2) x Z_1)`.
    Radial,
    /// `(H_m)`, `m >= 1`.
    Dihedral(u32),
}

impl OrbitType {
    /// Amalgamated notation with the mode filled in, e.g. `D_{6}^{D_{3}}x^{Z1}Z2`.
    pub fn label(&self) -> String {
        match self {
            OrbitType::Unit => "G".to_string(),
            OrbitType::Radial => "O(2)xZ1".to_string(),
            OrbitType::Dihedral(m) => format!("D_{{{}}}^{{D_{{{}}}}}x^{{Z1}}Z2", 2 * m, m),
        }
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitType::Dihedral(m) => write!(f, "(H_{m})"),
            other => write!(f, "({})", other.label()),
        }
    }
}

/// Finitely supported integer combination of tracked orbit types.
///
/// `has_untracked` marks elements whose true expansion carries orbit types
/// outside the tracked set; multiplication propagates it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "ElementJson", try_from = "ElementJson")]
pub struct BurnsideElement {
    coeffs: BTreeMap<OrbitType, i64>,
    has_untracked: bool,
}

impl BurnsideElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::from_orbit(OrbitType::Unit)
    }

    pub fn from_orbit(t: OrbitType) -> Self {
        let mut e = Self::zero();
        e.coeffs.insert(t, 1);
        e
    }

    /// Builds an element from `(orbit type, coefficient)` pairs, summing repeats.
    pub fn from_terms(terms: impl IntoIterator<Item = (OrbitType, i64)>) -> Result<Self> {
        let mut e = Self::zero();
        for (t, c) in terms {
            if t == OrbitType::Dihedral(0) {
                return Err(domain("dihedral orbit types need mode m >= 1"));
            }
            e.add_term(t, c)?;
        }
        Ok(e)
    }

    /// Marks the element as carrying orbit types outside the tracked set.
    pub fn with_untracked(mut self) -> Self {
        self.has_untracked = true;
        self
    }

    pub fn has_untracked(&self) -> bool {
        self.has_untracked
    }

    pub fn coeff(&self, t: OrbitType) -> i64 {
        self.coeffs.get(&t).copied().unwrap_or(0)
    }

    /// Non-zero terms in orbit-type order.
    pub fn terms(&self) -> impl Iterator<Item = (OrbitType, i64)> + '_ {
        self.coeffs.iter().map(|(&t, &c)| (t, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(OrbitType::Unit) == 1
    }

    fn add_term(&mut self, t: OrbitType, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let slot = self.coeffs.entry(t).or_insert(0);
        *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
        if *slot == 0 {
            self.coeffs.remove(&t);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t, c)?;
        }
        out.has_untracked |= other.has_untracked;
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t, c.checked_neg().ok_or(Error::Overflow)?)?;
        }
        out.has_untracked |= other.has_untracked;
        Ok(out)
    }
}

impl fmt::Display for BurnsideElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (t, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            match (i, c.unsigned_abs()) {
                (0, 1) if c > 0 => write!(f, "{t}")?,
                (0, a) if c > 0 => write!(f, "{a}{t}")?,
                (0, 1) => write!(f, "-{t}")?,
                (0, a) => write!(f, "-{a}{t}")?,
                (_, 1) => write!(f, " {sign} {t}")?,
                (_, a) => write!(f, " {sign} {a}{t}")?,
            }
        }
        if self.has_untracked {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    unit: i64,
    radial: i64,
    dihedral: BTreeMap<u32, i64>,
    untracked: bool,
}

impl From<BurnsideElement> for ElementJson {
    fn from(e: BurnsideElement) -> Self {
        let dihedral = e
            .terms()
            .filter_map(|(t, c)| match t {
                OrbitType::Dihedral(m) => Some((m, c)),
                _ => None,
            })
            .collect();
        ElementJson {
            unit: e.coeff(OrbitType::Unit),
            radial: e.coeff(OrbitType::Radial),
            dihedral,
            untracked: e.has_untracked,
        }
    }
}

impl TryFrom<ElementJson> for BurnsideElement {
    type Error = Error;

    fn try_from(j: ElementJson) -> Result<Self> {
        let terms = [(OrbitType::Unit, j.unit), (OrbitType::Radial, j.radial)]
            .into_iter()
            .chain(j.dihedral.into_iter().map(|(m, c)| (OrbitType::Dihedral(m), c)));
        let mut e = BurnsideElement::from_terms(terms)?;
        e.has_untracked = j.untracked;
        Ok(e)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pair_compatible(x: u32, y: u32) -> bool {
    let (x, y) = (u64::from(x), u64::from(y));
    let g = gcd(x, y);
    ((x + y) / g).is_multiple_of(2) || (x.abs_diff(y) / g).is_multiple_of(2)
}

/// The compatibility predicate `B(I)` on a non-empty set of positive modes.
pub fn predicate_b(modes: &[u32]) -> Result<bool> {
    if modes.is_empty() {
        return Err(domain("B(I) is undefined on the empty set"));
    }
    if modes.contains(&0) {
        return Err(domain("B(I) takes positive modes only"));
    }
    Ok(modes
        .iter()
        .enumerate()
        .all(|(i, &x)| modes[i + 1..].iter().all(|&y| pair_compatible(x, y))))
}

/// `deg_{W_m^-}`: `(G) - (O(2) x Z_1)` for `m = 0`, `(G) - (H_m)` otherwise.
pub fn basic_degree(m: u32) -> BurnsideElement {
    let lower = if m == 0 {
        OrbitType::Radial
    } else {
        OrbitType::Dihedral(m)
    };
    let mut e = BurnsideElement::unit();
    e.coeffs.insert(lower, -1);
    e
}

/// Product of two tracked elements.
///
/// Products involving `(O(2) x Z_1)` other than with the identity are not
/// determined by the tracked rule and are refused.
pub fn multiply(a: &BurnsideElement, b: &BurnsideElement) -> Result<BurnsideElement> {
    let mut out = BurnsideElement::zero();
    out.has_untracked = a.has_untracked || b.has_untracked;
    for (ta, ca) in a.terms() {
        for (tb, cb) in b.terms() {
            let c = ca.checked_mul(cb).ok_or(Error::Overflow)?;
            match (ta, tb) {
                (OrbitType::Unit, t) | (t, OrbitType::Unit) => out.add_term(t, c)?,
                (OrbitType::Dihedral(m), OrbitType::Dihedral(k)) => {
                    if pair_compatible(m, k) {
                        let g = gcd(u64::from(m), u64::from(k)) as u32;
                        out.add_term(OrbitType::Dihedral(g), c.checked_mul(2).ok_or(Error::Overflow)?)?;
                    }
                }
                (x, y) => {
                    return Err(Error::UnsupportedProduct(format!(
                        "{x} . {y} is outside the tracked product rule"
                    )))
                }
            }
        }
    }
    Ok(out)
}

/// Product of basic degrees over a multiset of modes, by repeated
/// multiplication. Mode 0 factors are rejected (see [`multiply`]).
pub fn product_of_basic_degrees(modes: &[u32]) -> Result<BurnsideElement> {
    modes
        .iter()
        .try_fold(BurnsideElement::unit(), |acc, &m| multiply(&acc, &basic_degree(m)))
}

fn odd_multiplicity_modes(modes: &[u32]) -> Vec<u32> {
    let mut parity: BTreeMap<u32, bool> = BTreeMap::new();
    for &m in modes {
        *parity.entry(m).or_insert(false) ^= true;
    }
    parity.into_iter().filter(|&(_, odd)| odd).map(|(m, _)| m).collect()
}

fn check_positive(modes: &[u32]) -> Result<()> {
    if modes.contains(&0) {
        return Err(domain("basic-degree products here take positive modes only"));
    }
    Ok(())
}

pub(crate) fn check_cap(len: usize, cap: usize) -> Result<()> {
    if len > cap {
        return Err(Error::Capacity {
            what: "power-set size (distinct modes)",
            limit: cap,
        });
    }
    Ok(())
}

/// `prod_{m in M} deg_{W_m^-}` via the power-set expansion
/// `sum_{I in P(M)} 2^{|I|-1} (-1)^{|I|} [B(I)] (H_gcd(I))`, with the empty set
/// contributing `(G)`.
///
/// Repeated modes cancel in pairs first since basic degrees are involutions.
pub fn expand_product(modes: &[u32]) -> Result<BurnsideElement> {
    expand_product_capped(modes, DEFAULT_POWERSET_CAP)
}

pub fn expand_product_capped(modes: &[u32], cap: usize) -> Result<BurnsideElement> {
    check_positive(modes)?;
    let distinct = odd_multiplicity_modes(modes);
    check_cap(distinct.len(), cap)?;
    let mut out = BurnsideElement::unit();
    let mut chosen = Vec::with_capacity(distinct.len());
    expand_rec(&distinct, 0, &mut chosen, 0, &mut out)?;
    Ok(out)
}

// B(I) fails for every superset of a failing I, so those branches are cut.
fn expand_rec(modes: &[u32], start: usize, chosen: &mut Vec<u32>, g: u64, out: &mut BurnsideElement) -> Result<()> {
    for i in start..modes.len() {
        let x = modes[i];
        if !chosen.iter().all(|&y| pair_compatible(x, y)) {
            continue;
        }
        chosen.push(x);
        let g2 = gcd(g, u64::from(x));
        let size = chosen.len() as u32;
        let mag = 1_i64.checked_shl(size - 1).ok_or(Error::Overflow)?;
        let sign = if size.is_multiple_of(2) { 1 } else { -1 };
        out.add_term(OrbitType::Dihedral(g2 as u32), sign * mag)?;
        expand_rec(modes, i + 1, chosen, g2, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Coefficient of `(H_{m0})` in `prod_{m in M} deg_{W_m^-}` for a set of
/// distinct modes:
///
/// ```text
/// -[m0 in M] + 2 * sum_{I in P(M), I != {}, {m0}} (-2)^{|I|-2} [m0 = gcd(I)] [B(I)]
/// ```
pub fn closed_form_coeff(modes: &[u32], m0: u32) -> Result<i64> {
    closed_form_coeff_capped(modes, m0, DEFAULT_POWERSET_CAP)
}

pub fn closed_form_coeff_capped(modes: &[u32], m0: u32, cap: usize) -> Result<i64> {
    if m0 == 0 {
        return Err(domain("m0 must be a positive mode"));
    }
    check_positive(modes)?;
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("closed-form coefficient expects distinct modes"));
    }
    check_cap(sorted.len(), cap)?;
    let first: i64 = if sorted.binary_search(&m0).is_ok() { -1 } else { 0 };
    let correction = weighted_gcd_sum(&sorted, m0, |_| 1)?
        .checked_mul(2)
        .ok_or(Error::Overflow)?;
    first.checked_add(correction).ok_or(Error::Overflow)
}

/// `sum_{I in P(M), |I| >= 2, gcd(I) = m0, B(I)} (-2)^{|I|-2} * weight(I)` over
/// sorted distinct modes. Callers enforce the power-set cap.
pub(crate) fn weighted_gcd_sum(modes: &[u32], m0: u32, weight: impl Fn(&[u32]) -> i64) -> Result<i64> {
    // only multiples of m0 can have gcd equal to m0
    let candidates: Vec<u32> = modes.iter().copied().filter(|x| x % m0 == 0).collect();
    let mut sum = 0_i64;
    let mut chosen = Vec::with_capacity(candidates.len());
    closed_rec(&candidates, 0, &mut chosen, 0, u64::from(m0), &weight, &mut sum)?;
    Ok(sum)
}

fn closed_rec(
    modes: &[u32],
    start: usize,
    chosen: &mut Vec<u32>,
    g: u64,
    m0: u64,
    weight: &dyn Fn(&[u32]) -> i64,
    sum: &mut i64,
) -> Result<()> {
    for i in start..modes.len() {
        let x = modes[i];
        if !chosen.iter().all(|&y| pair_compatible(x, y)) {
            continue;
        }
        chosen.push(x);
        let g2 = gcd(g, u64::from(x));
        let size = chosen.len() as u32;
        if size >= 2 && g2 == m0 {
            // (-2)^{|I|-2}
            let mag = 1_i64.checked_shl(size - 2).ok_or(Error::Overflow)?;
            let term = if size.is_multiple_of(2) { mag } else { -mag };
            let term = term.checked_mul(weight(chosen)).ok_or(Error::Overflow)?;
            *sum = sum.checked_add(term).ok_or(Error::Overflow)?;
        }
        closed_rec(modes, i + 1, chosen, g2, m0, weight, sum)?;
        chosen.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use OrbitType::*;

    fn el(terms: &[(OrbitType, i64)]) -> BurnsideElement {
        BurnsideElement::from_terms(terms.iter().copied()).unwrap()
    }

    #[test]
    fn predicate_examples() {
        assert!(!predicate_b(&[2, 3]).unwrap());
        assert!(predicate_b(&[3, 5]).unwrap());
        assert!(predicate_b(&[7]).unwrap());
        assert!(predicate_b(&[]).is_err());
        assert!(predicate_b(&[0, 1]).is_err());
    }

    #[test]
    fn predicate_matches_two_adic_valuation() {
        // B({x, y}) holds exactly when x and y carry the same power of two
        for x in 1..=64u32 {
            for y in 1..=64u32 {
                let same = x.trailing_zeros() == y.trailing_zeros();
                assert_eq!(predicate_b(&[x, y]).unwrap(), same, "({x}, {y})");
            }
        }
    }

    #[test]
    fn basic_degrees() {
        assert_eq!(basic_degree(0), el(&[(Unit, 1), (Radial, -1)]));
        assert_eq!(basic_degree(3), el(&[(Unit, 1), (Dihedral(3), -1)]));
        assert_eq!(basic_degree(1), el(&[(Unit, 1), (Dihedral(1), -1)]));
        assert!(!basic_degree(4).has_untracked());
    }

    #[test]
    fn multiplication_examples() {
        let h = |m| BurnsideElement::from_orbit(Dihedral(m));
        assert_eq!(multiply(&h(2), &h(6)).unwrap(), el(&[(Dihedral(2), 2)]));
        assert!(multiply(&h(2), &h(3)).unwrap().is_zero());
        assert_eq!(multiply(&h(5), &BurnsideElement::unit()).unwrap(), h(5));
    }

    #[test]
    fn radial_products_are_refused() {
        let radial = BurnsideElement::from_orbit(Radial);
        let h1 = BurnsideElement::from_orbit(Dihedral(1));
        assert!(matches!(multiply(&radial, &h1), Err(Error::UnsupportedProduct(_))));
        assert!(matches!(multiply(&radial, &radial), Err(Error::UnsupportedProduct(_))));
        assert!(product_of_basic_degrees(&[0, 1]).is_err());
        // the identity acts trivially even on the radial type
        assert_eq!(multiply(&radial, &BurnsideElement::unit()).unwrap(), radial);
    }

    #[test]
    fn untracked_flag_propagates() {
        let a = basic_degree(2).with_untracked();
        let p = multiply(&a, &basic_degree(3)).unwrap();
        assert!(p.has_untracked());
        assert!(multiply(&p, &BurnsideElement::unit()).unwrap().has_untracked());
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(
            expand_product(&[1, 2, 3]).unwrap(),
            el(&[(Unit, 1), (Dihedral(1), 1), (Dihedral(2), -1), (Dihedral(3), -1)])
        );
        assert_eq!(expand_product(&[4, 4]).unwrap(), BurnsideElement::unit());
        assert_eq!(expand_product(&[]).unwrap(), BurnsideElement::unit());
        assert_eq!(expand_product(&[1, 2, 3]).unwrap().coeff(Dihedral(2)), -1);
        assert!(expand_product(&[0]).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_coeff(&[1, 2, 3], 1).unwrap(), 1);
        assert_eq!(closed_form_coeff(&[9], 9).unwrap(), -1);
        assert_eq!(closed_form_coeff(&[2, 3], 1).unwrap(), 0);
        assert!(closed_form_coeff(&[2, 2], 2).is_err());
        assert!(closed_form_coeff(&[2], 0).is_err());
    }

    #[test]
    fn power_set_cap_is_a_hard_error() {
        let modes: Vec<u32> = (1..=23).collect();
        assert!(matches!(expand_product(&modes), Err(Error::Capacity { .. })));
        assert!(matches!(closed_form_coeff(&modes, 1), Err(Error::Capacity { .. })));
        assert!(expand_product_capped(&[1, 2, 3], 2).is_err());
        // pairs cancel before the cap is checked
        let mut doubled = modes.clone();
        doubled.extend_from_slice(&modes);
        assert!(expand_product(&doubled).unwrap().is_unit());
    }

    #[test]
    fn coeff_lookup() {
        let e = el(&[(Unit, 1), (Dihedral(2), -3)]);
        assert_eq!(e.coeff(Dihedral(2)), -3);
        assert_eq!(BurnsideElement::unit().coeff(Radial), 0);
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let e = el(&[(Dihedral(2), 3), (Dihedral(2), -3), (Unit, 0)]);
        assert!(e.is_zero());
        assert_eq!(e.terms().count(), 0);
        assert!(BurnsideElement::from_terms([(Dihedral(0), 1)]).is_err());
    }

    #[test]
    fn json_rendering() {
        let e = expand_product(&[1, 2, 3]).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"unit":1,"radial":0,"dihedral":{"1":1,"2":-1,"3":-1},"untracked":false}"#
        );
        let back: BurnsideElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn display() {
        assert_eq!(basic_degree(3).to_string(), "(G) - (H_3)");
        assert_eq!(basic_degree(0).to_string(), "(G) - (O(2)xZ1)");
        assert_eq!(BurnsideElement::zero().to_string(), "0");
        assert_eq!(Dihedral(3).label(), "D_{6}^{D_{3}}x^{Z1}Z2");
    }
}
