//! Schur Q-functions as polynomials: the one-row q_n, the two-row Q_ab, the
//! Pfaffian construction of Q_lambda, expansion of polynomials in the Q-basis,
//! and the quadratic-relation identity checkers.
//!
//! q_n and Q_lambda are memoized behind write-once tables; concurrent readers
//! observe either absence or the final (deterministic) value.

use crate::error::Error;
use crate::partitions::{
    strict_partitions_of, IndexSequence, PartFilter, StraightenResult, StrictPartition,
};
use crate::polyring::{Monomial, OddPolynomial};
use crate::rat::{format_rat, frac, rat, Rat};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

fn q_row_cache() -> &'static RwLock<Vec<OddPolynomial>> {
    static CACHE: OnceLock<RwLock<Vec<OddPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![OddPolynomial::one()]))
}

fn q_lambda_cache() -> &'static RwLock<HashMap<StrictPartition, OddPolynomial>> {
    static CACHE: OnceLock<RwLock<HashMap<StrictPartition, OddPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn norm_cache() -> &'static RwLock<HashMap<StrictPartition, Rat>> {
    static CACHE: OnceLock<RwLock<HashMap<StrictPartition, Rat>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The one-row Q-function q_n, the degree-n coefficient of e^(xi(t,u)).
/// Computed by the recursion n*q_n = sum over odd j <= n of j*t_j*q_(n-j).
pub fn q(n: u32) -> OddPolynomial {
    {
        let cache = q_row_cache().read().unwrap();
        if let Some(p) = cache.get(n as usize) {
            return p.clone();
        }
    }
    let mut cache = q_row_cache().write().unwrap();
    while cache.len() <= n as usize {
        let m = cache.len() as u32;
        let mut acc = OddPolynomial::zero();
        for j in (1..=m).step_by(2) {
            let tj = Monomial::var(j);
            for (mono, c) in cache[(m - j) as usize].terms() {
                acc.add_term(mono.mul(&tj), c * rat(j as i64));
            }
        }
        cache.push(acc.scale(&frac(1, m as i64)));
    }
    cache[n as usize].clone()
}

/// The two-row polynomial Q_ab, antisymmetric in its indices:
/// Q_ab = q_a q_b + 2 sum_{i=1..b} (-1)^i q_(a+i) q_(b-i) for a > b >= 0,
/// Q_aa = 0, Q_ba = -Q_ab. Negative labels are rejected; they are handled
/// only by sequence straightening, never as polynomials.
pub fn q_pair(a: i64, b: i64) -> Result<OddPolynomial, Error> {
    if a < 0 {
        return Err(Error::NegativeIndex(a));
    }
    if b < 0 {
        return Err(Error::NegativeIndex(b));
    }
    if a == b {
        return Ok(OddPolynomial::zero());
    }
    if a < b {
        return Ok(-&q_pair(b, a)?);
    }
    let (a, b) = (a as u32, b as u32);
    let mut acc = &q(a) * &q(b);
    for i in 1..=b {
        let sign = if i % 2 == 1 { rat(-2) } else { rat(2) };
        acc = &acc + &(&q(a + i) * &q(b - i)).scale(&sign);
    }
    Ok(acc)
}

/// An alternating square matrix of polynomials; antisymmetry is enforced on
/// construction from the strict upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingPolyMatrix {
    dim: usize,
    entries: Vec<OddPolynomial>,
}

impl AlternatingPolyMatrix {
    pub fn from_upper<F: FnMut(usize, usize) -> OddPolynomial>(dim: usize, mut upper: F) -> Self {
        let mut entries = vec![OddPolynomial::zero(); dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let e = upper(i, j);
                entries[j * dim + i] = -&e;
                entries[i * dim + j] = e;
            }
        }
        AlternatingPolyMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &OddPolynomial {
        &self.entries[i * self.dim + j]
    }
}

/// Exact Pfaffian by Laplace expansion along the first active row, memoized
/// on index subsets. The empty matrix has Pfaffian 1.
pub fn pfaffian(a: &AlternatingPolyMatrix) -> Result<OddPolynomial, Error> {
    if a.dim() % 2 != 0 {
        return Err(Error::OddDimension(a.dim()));
    }
    assert!(a.dim() <= 63, "Pfaffian dimension limited to 63");
    let full: u64 = (1u64 << a.dim()) - 1;
    let mut memo: HashMap<u64, OddPolynomial> = HashMap::new();
    Ok(pf_subset(a, full, &mut memo))
}

fn pf_subset(
    a: &AlternatingPolyMatrix,
    mask: u64,
    memo: &mut HashMap<u64, OddPolynomial>,
) -> OddPolynomial {
    if mask == 0 {
        return OddPolynomial::one();
    }
    if let Some(p) = memo.get(&mask) {
        return p.clone();
    }
    let active: Vec<usize> = (0..a.dim()).filter(|&i| mask & (1 << i) != 0).collect();
    let first = active[0];
    let mut acc = OddPolynomial::zero();
    for (r, &j) in active.iter().enumerate().skip(1) {
        let minor = pf_subset(a, mask & !(1 << first) & !(1 << j), memo);
        let term = a.entry(first, j) * &minor;
        // j sits at 1-based position r+1 within the active set
        if (r + 1) % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    memo.insert(mask, acc.clone());
    acc
}

/// The Schur Q-function Q_lambda as a polynomial: the Pfaffian of the matrix
/// (Q_{lambda_i lambda_j}), with odd-length lambda padded by one zero part.
/// Homogeneous of degree |lambda|.
pub fn q_lambda(lambda: &StrictPartition) -> OddPolynomial {
    {
        let cache = q_lambda_cache().read().unwrap();
        if let Some(p) = cache.get(lambda) {
            return p.clone();
        }
    }
    let mut labels: Vec<i64> = lambda.parts().iter().map(|&v| v as i64).collect();
    if labels.len() % 2 == 1 {
        labels.push(0);
    }
    let matrix = AlternatingPolyMatrix::from_upper(labels.len(), |i, j| {
        q_pair(labels[i], labels[j]).expect("partition labels are non-negative")
    });
    let p = pfaffian(&matrix).expect("padded dimension is even");
    q_lambda_cache()
        .write()
        .unwrap()
        .insert(lambda.clone(), p.clone());
    p
}

/// Q of an arbitrary non-negative index sequence: straighten, then
/// sign * scalar * Q_partition. Sequences that straighten to zero give the
/// zero polynomial; negative entries are an error.
pub fn q_of_sequence(seq: &IndexSequence) -> Result<OddPolynomial, Error> {
    if let Some(&v) = seq.parts().iter().find(|&&v| v < 0) {
        return Err(Error::NegativeIndex(v));
    }
    Ok(match seq.straighten() {
        StraightenResult::Zero => OddPolynomial::zero(),
        StraightenResult::Term {
            sign,
            scalar,
            partition,
        } => q_lambda(&partition).scale(&(rat(sign as i64) * scalar)),
    })
}

/// The squared norm <Q_lambda, Q_lambda>, computed (not assumed) and cached.
pub fn q_norm_sq(lambda: &StrictPartition) -> Rat {
    {
        let cache = norm_cache().read().unwrap();
        if let Some(v) = cache.get(lambda) {
            return v.clone();
        }
    }
    let p = q_lambda(lambda);
    let n = p.inner_product(&p);
    assert!(!n.is_zero(), "Q_{lambda} has zero norm; basis is broken");
    norm_cache().write().unwrap().insert(lambda.clone(), n.clone());
    n
}

/// A finite linear combination of Q_lambda with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QExpansion {
    terms: BTreeMap<StrictPartition, Rat>,
}

impl QExpansion {
    pub fn empty() -> Self {
        QExpansion::default()
    }

    pub fn single(lambda: StrictPartition, coeff: Rat) -> Self {
        let mut e = QExpansion::empty();
        e.add_term(lambda, coeff);
        e
    }

    /// Accumulates `coeff * Q_lambda`, dropping cancelled entries.
    pub fn add_term(&mut self, lambda: StrictPartition, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(lambda);
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

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, lambda: &StrictPartition) -> Rat {
        self.terms.get(lambda).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&StrictPartition, &Rat)> + '_ {
        self.terms.iter()
    }

    /// Terms in decreasing lexicographic partition order, the listing order
    /// used everywhere externally.
    pub fn iter_decreasing_lex(&self) -> impl Iterator<Item = (&StrictPartition, &Rat)> + '_ {
        self.terms.iter().rev()
    }

    pub fn scale(&self, c: &Rat) -> QExpansion {
        if c.is_zero() {
            return QExpansion::empty();
        }
        QExpansion {
            terms: self
                .terms
                .iter()
                .map(|(l, v)| (l.clone(), v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &QExpansion) -> QExpansion {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    /// Realizes the expansion as a polynomial.
    pub fn to_polynomial(&self) -> OddPolynomial {
        let mut acc = OddPolynomial::zero();
        for (l, c) in &self.terms {
            acc = &acc + &q_lambda(l).scale(c);
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .iter_decreasing_lex()
            .map(|(l, c)| {
                serde_json::json!({
                    "partition": l.to_json(),
                    "coeff": format_rat(c),
                })
            })
            .collect();
        serde_json::Value::Array(list)
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.iter_decreasing_lex().enumerate() {
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
            if abs == rat(1) {
                write!(f, "Q{}", l)?;
            } else {
                write!(f, "{}*Q{}", format_rat(&abs), l)?;
            }
        }
        Ok(())
    }
}

/// Expands a polynomial over the Q-basis by inner-product quotients
/// <p, Q_lambda> / <Q_lambda, Q_lambda>, per graded component. The result is
/// re-expanded and compared against the input; a mismatch is a bug and
/// panics.
pub fn expand_in_q(p: &OddPolynomial) -> QExpansion {
    let mut expansion = QExpansion::empty();
    for d in p.degrees() {
        let component = p.graded_component(d as i64);
        for lambda in strict_partitions_of(d, PartFilter::All) {
            let c = component.inner_product(&q_lambda(&lambda)) / q_norm_sq(&lambda);
            expansion.add_term(lambda, c);
        }
    }
    assert_eq!(
        &expansion.to_polynomial(),
        p,
        "Q-expansion failed to reconstruct its input"
    );
    expansion
}

/// The Pfaffian quadratic relation for Q_lambda, in the branch matching the
/// parity of the length. Empty partitions are vacuously true.
pub fn check_quadratic_relation(lambda: &StrictPartition) -> bool {
    let l = lambda.len();
    if l == 0 {
        return true;
    }
    let seq = IndexSequence::from(lambda);
    let lhs = q_lambda(lambda);
    let mut rhs = OddPolynomial::zero();
    if l % 2 == 1 {
        // Q_lambda = sum_i (-1)^(i+1) q_(lambda_i) Q_(lambda minus slot i)
        for idx in 0..l {
            let term = &q(lambda.parts()[idx])
                * &q_of_sequence(&seq.without(idx)).expect("non-negative");
            rhs = if idx % 2 == 0 { &rhs + &term } else { &rhs - &term };
        }
    } else {
        // Q_lambda = sum_{i>=2} (-1)^i Q_(lambda_1 lambda_i) Q_(rest)
        for idx in 1..l {
            let pair = q_pair(lambda.parts()[0] as i64, lambda.parts()[idx] as i64)
                .expect("non-negative");
            let rest = seq.without(idx).without(0);
            let term = &pair * &q_of_sequence(&rest).expect("non-negative");
            rhs = if (idx + 1) % 2 == 0 { &rhs + &term } else { &rhs - &term };
        }
    }
    lhs == rhs
}

/// Which of the four appended-index expansion identities to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendCase {
    /// Q_(alpha x) for odd-length alpha.
    SingleOdd,
    /// Q_(alpha x) for even-length alpha.
    SingleEven,
    /// Q_(alpha x y) for odd-length alpha.
    DoubleOdd,
    /// Q_(alpha x y) for even-length alpha.
    DoubleEven,
}

/// Verifies the chosen appended-index identity exactly as polynomials.
/// `alpha` must be non-negative with length parity matching the case; `y` is
/// ignored by the single-append cases.
pub fn check_append_expansion(
    case: AppendCase,
    alpha: &IndexSequence,
    x: u32,
    y: u32,
) -> Result<bool, Error> {
    if let Some(&v) = alpha.parts().iter().find(|&&v| v < 0) {
        return Err(Error::NegativeIndex(v));
    }
    let l = alpha.len();
    let odd = l % 2 == 1;
    let wants_odd = matches!(case, AppendCase::SingleOdd | AppendCase::DoubleOdd);
    if odd != wants_odd {
        return Err(Error::ParityMismatch);
    }
    // the even cases expand along the first entry of alpha
    if l == 0 {
        return Err(Error::EmptySequence);
    }
    let x_i = x as i64;
    let y_i = y as i64;
    let q_alpha = q_of_sequence(alpha)?;

    let ok = match case {
        AppendCase::SingleOdd => {
            let lhs = q_of_sequence(&alpha.with_appended(&[x_i]))?;
            let mut rhs = -&(&q(x) * &q_alpha);
            for idx in 0..l {
                let ai = alpha.parts()[idx];
                let sign = if (idx + 1) % 2 == 0 { rat(-1) } else { rat(1) }; // -(-1)^i
                let dropped = alpha.without(idx);
                let t1 = (&q(ai as u32) * &q_of_sequence(&dropped.with_appended(&[x_i]))?)
                    .scale(&sign);
                let t2 = (&q_of_sequence(&IndexSequence::new(vec![ai, x_i]))?
                    * &q_of_sequence(&dropped)?)
                    .scale(&sign);
                rhs = &(&rhs + &t1) + &t2;
            }
            lhs == rhs
        }
        AppendCase::SingleEven => {
            let lhs = q_of_sequence(&alpha.with_appended(&[x_i]))?;
            let mut rhs = -&(&q(x) * &q_alpha);
            let a1 = alpha.parts()[0];
            for idx in 1..l {
                let ai = alpha.parts()[idx];
                let sign = if (idx + 1) % 2 == 0 { rat(1) } else { rat(-1) }; // (-1)^i
                let tail = alpha.without(idx).without(0);
                let t1 = (&q_of_sequence(&IndexSequence::new(vec![a1, ai]))?
                    * &q_of_sequence(&tail.with_appended(&[x_i]))?)
                    .scale(&sign);
                let t2 = (&q_of_sequence(&IndexSequence::new(vec![a1, ai, x_i]))?
                    * &q_of_sequence(&tail)?)
                    .scale(&sign);
                rhs = &(&rhs + &t1) + &t2;
            }
            lhs == rhs
        }
        AppendCase::DoubleOdd => {
            let lhs = q_of_sequence(&alpha.with_appended(&[x_i, y_i]))?;
            let q_xy = q_of_sequence(&IndexSequence::new(vec![x_i, y_i]))?;
            let mut rhs = -&(&q_xy * &q_alpha);
            for idx in 0..l {
                let ai = alpha.parts()[idx];
                let sign = if (idx + 1) % 2 == 0 { rat(-1) } else { rat(1) }; // -(-1)^i
                let dropped = alpha.without(idx);
                let t1 = (&q(ai as u32)
                    * &q_of_sequence(&dropped.with_appended(&[x_i, y_i]))?)
                    .scale(&sign);
                let t2 = (&q_of_sequence(&IndexSequence::new(vec![ai, x_i, y_i]))?
                    * &q_of_sequence(&dropped)?)
                    .scale(&sign);
                rhs = &(&rhs + &t1) + &t2;
            }
            lhs == rhs
        }
        AppendCase::DoubleEven => {
            let lhs = q_of_sequence(&alpha.with_appended(&[x_i, y_i]))?;
            let q_xy = q_of_sequence(&IndexSequence::new(vec![x_i, y_i]))?;
            let mut rhs = -&(&q_xy * &q_alpha);
            let a1 = alpha.parts()[0];
            for idx in 1..l {
                let ai = alpha.parts()[idx];
                let sign = if (idx + 1) % 2 == 0 { rat(1) } else { rat(-1) }; // (-1)^i
                let tail = alpha.without(idx).without(0);
                let t1 = (&q_of_sequence(&IndexSequence::new(vec![a1, ai]))?
                    * &q_of_sequence(&tail.with_appended(&[x_i, y_i]))?)
                    .scale(&sign);
                let t2 = (&q_of_sequence(&IndexSequence::new(vec![a1, ai, x_i, y_i]))?
                    * &q_of_sequence(&tail)?)
                    .scale(&sign);
                rhs = &(&rhs + &t1) + &t2;
            }
            lhs == rhs
        }
    };
    Ok(ok)
}

/// The quadratic t-identity: for n = 2m,
/// sum_{i<m} (2i+1) t_(2i+1) (n-2i-1) t_(n-2i-1)
///   = 2 sum_{i<m} (-1)^i (m-i) Q_(n-i, i).
pub fn check_quadratic_t_identity(m: u32) -> bool {
    assert!(m >= 1, "m must be positive");
    let n = 2 * m;
    let mut lhs = OddPolynomial::zero();
    for i in 0..m {
        let a = 2 * i + 1;
        let b = n - a;
        lhs.add_term(
            Monomial::from_exponents([(a, 1), (b, 1)]),
            rat(a as i64 * b as i64),
        );
    }
    let mut rhs = OddPolynomial::zero();
    for i in 0..m {
        let sign = if i % 2 == 0 { 1i64 } else { -1 };
        let coeff = rat(2 * sign * (m - i) as i64);
        let qpoly = q_of_sequence(&IndexSequence::new(vec![(n - i) as i64, i as i64]))
            .expect("non-negative");
        rhs = &rhs + &qpoly.scale(&coeff);
    }
    lhs == rhs
}
