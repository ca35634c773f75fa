//! The sparse polynomial ring Q[t_j ; j odd] with the weighted grading
//! deg t_j = j, its inner product, and normal-ordered differential operators.

use crate::error::Error;
use crate::rat::{format_rat, frac, rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A product of odd-indexed variables, stored as {index -> exponent > 0}.
/// The empty map is the unit monomial.
///
/// The derived `Ord` compares (index, exponent) pairs lexicographically; it
/// is the canonical serialization order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exponents: BTreeMap<u32, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The single variable t_j. Panics when `j` is even or zero; variable
    /// indices are odd by construction everywhere in this crate.
    pub fn var(j: u32) -> Self {
        assert!(j % 2 == 1, "variable index {j} must be odd");
        let mut exponents = BTreeMap::new();
        exponents.insert(j, 1);
        Monomial { exponents }
    }

    /// Builds from (index, exponent) pairs; zero exponents are dropped and
    /// repeated indices accumulate.
    pub fn from_exponents<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut exponents = BTreeMap::new();
        for (j, e) in pairs {
            assert!(j % 2 == 1, "variable index {j} must be odd");
            if e > 0 {
                *exponents.entry(j).or_insert(0) += e;
            }
        }
        Monomial { exponents }
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent_of(&self, j: u32) -> u32 {
        self.exponents.get(&j).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.exponents.iter().map(|(&j, &e)| (j, e))
    }

    /// Sum of index * exponent.
    pub fn weighted_degree(&self) -> u32 {
        self.exponents.iter().map(|(&j, &e)| j * e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exponents = self.exponents.clone();
        for (&j, &e) in &other.exponents {
            *exponents.entry(j).or_insert(0) += e;
        }
        Monomial { exponents }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&j, &e) in &self.exponents {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "t{}", j)?;
            } else {
                write!(f, "t{}^{}", j, e)?;
            }
        }
        Ok(())
    }
}

/// A sparse exact-rational polynomial in the odd variables. Zero coefficients
/// are never stored, so equal polynomials have identical term maps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OddPolynomial {
    terms: BTreeMap<Monomial, Rat>,
}

impl OddPolynomial {
    pub fn zero() -> Self {
        OddPolynomial::default()
    }

    pub fn one() -> Self {
        OddPolynomial::constant(rat(1))
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = OddPolynomial::default();
        p.add_term(Monomial::one(), c);
        p
    }

    /// The variable t_j as a polynomial.
    pub fn var(j: u32) -> Self {
        let mut p = OddPolynomial::default();
        p.add_term(Monomial::var(j), rat(1));
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rat)>>(terms: I) -> Self {
        let mut p = OddPolynomial::default();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m`, dropping the entry when the coefficient cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn scale(&self, c: &Rat) -> OddPolynomial {
        if c.is_zero() {
            return OddPolynomial::zero();
        }
        OddPolynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Largest weighted degree among the terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::weighted_degree)
            .max()
            .unwrap_or(0)
    }

    /// Formal partial derivative with respect to t_j.
    pub fn differentiate(&self, j: u32) -> Result<OddPolynomial, Error> {
        if j == 0 || j % 2 == 0 {
            return Err(Error::InvalidVariable(j));
        }
        let mut out = OddPolynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(j);
            if e == 0 {
                continue;
            }
            let reduced = Monomial::from_exponents(
                m.exponents()
                    .map(|(k, ek)| if k == j { (k, ek - 1) } else { (k, ek) }),
            );
            out.add_term(reduced, c * rat(e as i64));
        }
        Ok(out)
    }

    /// The sum of terms of weighted degree exactly `n`; zero for `n < 0`.
    pub fn graded_component(&self, n: i64) -> OddPolynomial {
        if n < 0 {
            return OddPolynomial::zero();
        }
        OddPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree() as i64 == n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The weighted degrees that actually occur, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.terms.keys().map(Monomial::weighted_degree).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// The inner product <F, G> = F(2*d~) G(t) at t = 0, where t_j is
    /// replaced by (2/j) d/dt_j. For monomials this pairs equal exponent
    /// patterns with weight prod_j (2/j)^e_j * e_j!.
    pub fn inner_product(&self, other: &OddPolynomial) -> Rat {
        let mut acc = rat(0);
        for (m, c) in &self.terms {
            if let Some(d) = other.terms.get(m) {
                acc += c * d * monomial_pair_weight(m);
            }
        }
        acc
    }

    /// Evaluates at a rational point; variables absent from `point` are 0.
    pub fn evaluate(&self, point: &BTreeMap<u32, Rat>) -> Rat {
        let mut acc = rat(0);
        'term: for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (j, e) in m.exponents() {
                match point.get(&j) {
                    None => continue 'term,
                    Some(v) => {
                        if v.is_zero() {
                            continue 'term;
                        }
                        prod *= crate::rat::pow(v, e);
                    }
                }
            }
            acc += prod;
        }
        acc
    }

    /// Deterministic pseudo-random polynomial for self-check sweeps. The
    /// same seed always yields the same polynomial, so sweeps that use it
    /// stay reproducible.
    pub fn sample(seed: u64, max_degree: u32) -> OddPolynomial {
        let mut state = seed;
        let mut p = OddPolynomial::zero();
        let num_terms = 3 + splitmix(&mut state) % 3;
        for _ in 0..num_terms {
            let mut exponents: Vec<(u32, u32)> = Vec::new();
            let mut budget = (splitmix(&mut state) % (max_degree as u64 + 1)) as u32;
            while budget >= 1 {
                let odd_choices = (budget + 1) / 2;
                let j = 2 * (splitmix(&mut state) % odd_choices as u64) as u32 + 1;
                exponents.push((j, 1));
                budget -= j;
            }
            let raw = (splitmix(&mut state) % 8) as i64 - 4;
            let numer = if raw >= 0 { raw + 1 } else { raw };
            let denom = (splitmix(&mut state) % 3) as i64 + 1;
            p.add_term(Monomial::from_exponents(exponents), frac(numer, denom));
        }
        p
    }

    /// Canonical JSON form: a list of {"coeff", "monomial"} objects in
    /// ascending monomial order, rationals as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mono = serde_json::Map::new();
                for (j, e) in m.exponents() {
                    mono.insert(j.to_string(), e.into());
                }
                serde_json::json!({
                    "coeff": format_rat(c),
                    "monomial": serde_json::Value::Object(mono),
                })
            })
            .collect();
        serde_json::Value::Array(list)
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn monomial_pair_weight(m: &Monomial) -> Rat {
    let mut w = rat(1);
    for (j, e) in m.exponents() {
        w *= crate::rat::pow(&frac(2, j as i64), e);
        for k in 1..=e {
            w *= rat(k as i64);
        }
    }
    w
}

/// Display order for terms: higher total exponent first, map order after.
/// Reads naturally for homogeneous polynomials (t1^4 before t1*t3).
pub(crate) fn display_order(m1: &Monomial, m2: &Monomial) -> std::cmp::Ordering {
    let s1: u32 = m1.exponents().map(|(_, e)| e).sum();
    let s2: u32 = m2.exponents().map(|(_, e)| e).sum();
    s2.cmp(&s1).then_with(|| m1.cmp(m2))
}

impl fmt::Display for OddPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, &Rat)> = self.terms.iter().collect();
        ordered.sort_by(|(m1, _), (m2, _)| display_order(m1, m2));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let negative = c < &rat(0);
            let abs = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", format_rat(&abs))?;
            } else if abs == rat(1) {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", format_rat(&abs), m)?;
            }
        }
        Ok(())
    }
}

impl Add for &OddPolynomial {
    type Output = OddPolynomial;
    fn add(self, rhs: &OddPolynomial) -> OddPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &OddPolynomial {
    type Output = OddPolynomial;
    fn sub(self, rhs: &OddPolynomial) -> OddPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &OddPolynomial {
    type Output = OddPolynomial;
    fn neg(self) -> OddPolynomial {
        OddPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &OddPolynomial {
    type Output = OddPolynomial;
    fn mul(self, rhs: &OddPolynomial) -> OddPolynomial {
        let mut out = OddPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

/// A finite normal-ordered differential operator: a sum of terms
/// coeff * (t-monomial) * (product of partials), with every multiplication
/// standing to the left of every derivative. Terms with equal monomial parts
/// are merged, so the representation is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffOperator {
    // (left multiplication monomial, derivative multiset) -> coefficient
    terms: BTreeMap<(Monomial, Monomial), Rat>,
}

impl DiffOperator {
    pub fn zero() -> Self {
        DiffOperator::default()
    }

    /// Adds `coeff * left * prod d/dt_j` where `ders` maps j to the order of
    /// differentiation in t_j.
    pub fn add_term(&mut self, coeff: Rat, left: Monomial, ders: Monomial) {
        if coeff.is_zero() {
            return;
        }
        let key = (left, ders);
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Rat)> + '_ {
        self.terms.iter()
    }

    /// Applies the operator: derivatives first, then the left monomial and
    /// the coefficient, summed over terms.
    pub fn apply(&self, p: &OddPolynomial) -> OddPolynomial {
        let mut out = OddPolynomial::zero();
        for ((left, ders), coeff) in &self.terms {
            let mut q = p.clone();
            'ders: for (j, order) in ders.exponents() {
                for _ in 0..order {
                    q = q
                        .differentiate(j)
                        .expect("derivative indices in an operator are odd");
                    if q.is_zero() {
                        break 'ders;
                    }
                }
            }
            if q.is_zero() {
                continue;
            }
            for (m, c) in q.terms {
                out.add_term(left.mul(&m), coeff * c);
            }
        }
        out
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((left, ders), coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_rat(coeff))?;
            if !left.is_one() {
                write!(f, "*{}", left)?;
            }
            for (j, order) in ders.exponents() {
                if order == 1 {
                    write!(f, "*d{}", j)?;
                } else {
                    write!(f, "*d{}^{}", j, order)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(j: u32) -> OddPolynomial {
        OddPolynomial::var(j)
    }

    #[test]
    fn ring_arithmetic_examples() {
        let t1 = t(1);
        assert_eq!(&t1 * &t1, OddPolynomial::from_terms([(Monomial::from_exponents([(1, 2)]), rat(1))]));
        assert!((&(&t1 * &t1) - &(&t1 * &t1)).is_zero());
        let half_t1_sq = (&t1 * &t1).scale(&frac(1, 2));
        let two_t3 = t(3).scale(&rat(2));
        let prod = &half_t1_sq * &two_t3;
        let expected = OddPolynomial::from_terms([(
            Monomial::from_exponents([(1, 2), (3, 1)]),
            rat(1),
        )]);
        assert_eq!(prod, expected);
    }

    #[test]
    fn differentiate_examples() {
        let t1sq = &t(1) * &t(1);
        assert_eq!(t1sq.differentiate(1).unwrap(), t(1).scale(&rat(2)));
        assert!(t(1).differentiate(3).unwrap().is_zero());
        let p = &t(1) * &(&t(3) * &t(3));
        let expected = (&t(1) * &t(3)).scale(&rat(2));
        assert_eq!(p.differentiate(3).unwrap(), expected);
        assert!(matches!(p.differentiate(2), Err(Error::InvalidVariable(2))));
        assert!(matches!(p.differentiate(0), Err(Error::InvalidVariable(0))));
    }

    #[test]
    fn graded_component_examples() {
        let p = &(&OddPolynomial::one() + &t(1)) + &(&(&t(1) * &(&t(1) * &t(1))) + &t(3));
        let deg3 = p.graded_component(3);
        let expected = &(&t(1) * &(&t(1) * &t(1))) + &t(3);
        assert_eq!(deg3, expected);
        assert!(p.graded_component(-1).is_zero());
        assert_eq!(p.graded_component(0), OddPolynomial::one());
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(t(1).inner_product(&t(1)), rat(2));
        assert_eq!(t(1).inner_product(&t(3)), rat(0));
        assert_eq!(t(3).inner_product(&t(3)), frac(2, 3));
        let t1sq = &t(1) * &t(1);
        assert_eq!(t1sq.inner_product(&t1sq), rat(8));
    }

    #[test]
    fn apply_diff_examples() {
        // t1 * d1 acting on t1^3 scales by the exponent
        let mut euler = DiffOperator::zero();
        euler.add_term(rat(1), Monomial::var(1), Monomial::var(1));
        let t1cubed = OddPolynomial::from_terms([(Monomial::from_exponents([(1, 3)]), rat(1))]);
        assert_eq!(euler.apply(&t1cubed), t1cubed.scale(&rat(3)));

        // d1^2 on t1^2 gives 2
        let mut dsq = DiffOperator::zero();
        dsq.add_term(rat(1), Monomial::one(), Monomial::from_exponents([(1, 2)]));
        let t1sq = &t(1) * &t(1);
        assert_eq!(dsq.apply(&t1sq), OddPolynomial::constant(rat(2)));
    }

    #[test]
    fn operator_terms_merge() {
        let mut op = DiffOperator::zero();
        op.add_term(rat(1), Monomial::one(), Monomial::from_exponents([(1, 1), (3, 1)]));
        op.add_term(rat(1), Monomial::one(), Monomial::from_exponents([(3, 1), (1, 1)]));
        assert_eq!(op.terms().count(), 1);
        let (_, c) = op.terms().next().unwrap();
        assert_eq!(c, &rat(2));
        op.add_term(rat(-2), Monomial::one(), Monomial::from_exponents([(1, 1), (3, 1)]));
        assert!(op.is_zero());
    }

    #[test]
    fn display_is_readable() {
        let p = &t(3).scale(&rat(-2)) + &OddPolynomial::from_terms([(
            Monomial::from_exponents([(1, 3)]),
            frac(1, 6),
        )]);
        assert_eq!(p.to_string(), "1/6*t1^3 - 2*t3");
        assert_eq!(OddPolynomial::zero().to_string(), "0");
        assert_eq!(OddPolynomial::constant(frac(-1, 2)).to_string(), "-1/2");
    }

    fn arb_poly() -> impl Strategy<Value = OddPolynomial> {
        proptest::collection::vec(
            (
                proptest::collection::vec((0u32..3, 1u32..3), 0..3),
                -4i64..5,
            ),
            0..5,
        )
        .prop_map(|raw| {
            let mut p = OddPolynomial::zero();
            for (vars, c) in raw {
                let m = Monomial::from_exponents(vars.into_iter().map(|(v, e)| (2 * v + 1, e)));
                p.add_term(m, rat(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly(), v in 0u32..3) {
            let j = 2 * v + 1;
            let lhs = (&a * &b).differentiate(j).unwrap();
            let rhs = &(&a.differentiate(j).unwrap() * &b) + &(&a * &b.differentiate(j).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn graded_components_sum_back(a in arb_poly()) {
            let mut total = OddPolynomial::zero();
            for d in a.degrees() {
                total = &total + &a.graded_component(d as i64);
            }
            prop_assert_eq!(total, a);
        }

        #[test]
        fn inner_product_symmetric(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.inner_product(&b), b.inner_product(&a));
        }

        #[test]
        fn inner_product_kills_degree_mismatch(a in arb_poly(), b in arb_poly()) {
            for da in a.degrees() {
                for db in b.degrees() {
                    if da != db {
                        let fa = a.graded_component(da as i64);
                        let fb = b.graded_component(db as i64);
                        prop_assert_eq!(fa.inner_product(&fb), rat(0));
                    }
                }
            }
        }
    }
}
