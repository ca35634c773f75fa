//! The reduced Fock representation of the Virasoro algebra on the odd
//! polynomial ring, in two independent realizations:
//!
//! - [`build_l`]/[`act_diff`]: L_k as a normal-ordered differential operator,
//!   L_k = (1/2) sum over odd j of :a_(-j) a_(j+2k): + (1/8) delta_(k,0),
//!   with a_j = sqrt(2) d_j and a_(-j) = (j/sqrt 2) t_j. The sqrt(2) factors
//!   always pair up, so every coefficient is rational. Explicitly:
//!
//! ```text
//! k >= 1:  L_k = sum_(i odd <= 2k-1) d_i d_(2k-i) + sum_(j odd) j t_j d_(j+2k)
//! k  = 0:  L_0 = sum_(j odd) j t_j d_j + 1/8
//! k <= -1: L_k = (1/4) sum (2i+1)(2|k|-2i-1) t_(2i+1) t_(2|k|-2i-1)
//!                + sum_(j odd >= 2|k|+1) j t_j d_(j-2|k|)
//! ```
//!
//! - [`act_closed_lower`]/[`act_closed_raise`]: the closed-form action on
//!   Q-expansions, every raw index term straightened through `partitions`.
//!
//! The operators satisfy [L_k, L_l] = 2(k-l) L_(k+l) + ((k^3-k)/3) delta.
//! The central-charge-1 generators are (1/2) L_k; see
//! [`reduced_generator_scale`]. L_k itself is the primitive normalization
//! everywhere in this crate.

use crate::partitions::{strict_partitions_of, IndexSequence, PartFilter, StraightenResult, StrictPartition};
use crate::polyring::{DiffOperator, Monomial, OddPolynomial};
use crate::qcalc::{expand_in_q, q_lambda, q_of_sequence, QExpansion};
use crate::rat::{format_rat, frac, rat, Rat};
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

/// A finite normal-ordered operator that reproduces L_k exactly on every
/// V(m) with m <= degree_bound.
pub fn build_l(k: i32, degree_bound: u32) -> DiffOperator {
    let mut op = DiffOperator::zero();
    if k == 0 {
        op.add_term(frac(1, 8), Monomial::one(), Monomial::one());
        for j in (1..=degree_bound).step_by(2) {
            op.add_term(rat(j as i64), Monomial::var(j), Monomial::var(j));
        }
    } else if k > 0 {
        let k = k as u32;
        for i in (1..=2 * k - 1).step_by(2) {
            op.add_term(
                rat(1),
                Monomial::one(),
                Monomial::from_exponents([(i, 1), (2 * k - i, 1)]),
            );
        }
        for j in (1..=degree_bound.saturating_sub(2 * k)).step_by(2) {
            op.add_term(rat(j as i64), Monomial::var(j), Monomial::var(j + 2 * k));
        }
    } else {
        let k = (-k) as u32;
        for i in 0..k {
            let a = 2 * i + 1;
            let b = 2 * k - a;
            op.add_term(
                frac((a * b) as i64, 4),
                Monomial::from_exponents([(a, 1), (b, 1)]),
                Monomial::one(),
            );
        }
        for j in (2 * k + 1..=degree_bound + 2 * k).step_by(2) {
            op.add_term(rat(j as i64), Monomial::var(j), Monomial::var(j - 2 * k));
        }
    }
    op
}

/// L_k applied in the polynomial realization.
pub fn act_diff(k: i32, p: &OddPolynomial) -> OddPolynomial {
    if p.is_zero() {
        return OddPolynomial::zero();
    }
    build_l(k, p.degree()).apply(p)
}

fn add_straightened(out: &mut QExpansion, seq: &IndexSequence, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    if let StraightenResult::Term {
        sign,
        scalar,
        partition,
    } = seq.straighten()
    {
        out.add_term(partition, coeff * rat(sign as i64) * scalar);
    }
}

/// The closed-form lowering action, extended linearly:
/// L_(-k) Q_alpha = sum_i (alpha_i + k) Q_(alpha + 2k e_i)
///   + (1/2) sum_(i=0..k-1) (-1)^i (k-i) Q_(alpha, 2k-i, i).
pub fn act_closed_lower(k: u32, e: &QExpansion) -> QExpansion {
    assert!(k >= 1, "lowering index must be positive");
    let mut out = QExpansion::empty();
    for (lambda, c) in e.terms() {
        let alpha = IndexSequence::from(lambda);
        for i in 1..=alpha.len() {
            let shifted = alpha.shift_part(i, 2 * k as i64).expect("in range");
            let coeff = c * rat(lambda.parts()[i - 1] as i64 + k as i64);
            add_straightened(&mut out, &shifted, coeff);
        }
        for i in 0..k {
            let appended = alpha.with_appended(&[(2 * k - i) as i64, i as i64]);
            let sign = if i % 2 == 0 { 1i64 } else { -1 };
            let coeff = c * frac(sign * (k - i) as i64, 2);
            add_straightened(&mut out, &appended, coeff);
        }
    }
    out
}

/// The closed-form raising action, extended linearly:
/// L_k Q_alpha = sum_i (alpha_i - k) Q_(alpha - 2k e_i), summed over the
/// actual parts of each key and straightened. Entries driven negative
/// contract against a matching positive part via the Q_(a,-a) convention or
/// drop to zero when unpaired.
pub fn act_closed_raise(k: u32, e: &QExpansion) -> QExpansion {
    assert!(k >= 1, "raising index must be positive");
    let mut out = QExpansion::empty();
    for (lambda, c) in e.terms() {
        let alpha = IndexSequence::from(lambda);
        for i in 1..=alpha.len() {
            let shifted = alpha.shift_part(i, -2 * (k as i64)).expect("in range");
            let coeff = c * rat(lambda.parts()[i - 1] as i64 - k as i64);
            add_straightened(&mut out, &shifted, coeff);
        }
    }
    out
}

fn partitions_of_degree(d: i64) -> Vec<StrictPartition> {
    if d < 0 {
        Vec::new()
    } else {
        strict_partitions_of(d as u32, PartFilter::All)
    }
}

fn l_expansion_cache() -> &'static RwLock<HashMap<(i32, StrictPartition), QExpansion>> {
    static CACHE: OnceLock<RwLock<HashMap<(i32, StrictPartition), QExpansion>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The Q-expansion of L_k Q_lambda via the differential action, cached; the
/// matrix assemblers hit the same pairs repeatedly.
fn l_action_expansion(k: i32, lambda: &StrictPartition) -> QExpansion {
    let key = (k, lambda.clone());
    {
        let cache = l_expansion_cache().read().unwrap();
        if let Some(e) = cache.get(&key) {
            return e.clone();
        }
    }
    let e = expand_in_q(&act_diff(k, &q_lambda(lambda)));
    l_expansion_cache().write().unwrap().insert(key, e.clone());
    e
}

/// The exact matrix of L_k from V(n) to V(n-2k), rows and columns labelled
/// by strict partitions in decreasing lexicographic order. Entry (mu,
/// lambda) is the coefficient of Q_mu in L_k Q_lambda.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    k: i32,
    source_degree: u32,
    rows: Vec<StrictPartition>,
    cols: Vec<StrictPartition>,
    entries: Vec<Vec<Rat>>,
}

impl OperatorMatrix {
    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn source_degree(&self) -> u32 {
        self.source_degree
    }

    pub fn target_degree(&self) -> i64 {
        self.source_degree as i64 - 2 * self.k as i64
    }

    pub fn rows(&self) -> &[StrictPartition] {
        &self.rows
    }

    pub fn cols(&self) -> &[StrictPartition] {
        &self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rat {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "n": self.source_degree,
            "rows": self.rows.iter().map(StrictPartition::to_json).collect::<Vec<_>>(),
            "cols": self.cols.iter().map(StrictPartition::to_json).collect::<Vec<_>>(),
            "entries": self.entries.iter().map(|row| {
                row.iter().map(format_rat).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "L_{} : V({}) -> V({})",
            self.k,
            self.source_degree,
            self.target_degree()
        )?;
        write!(f, "cols:")?;
        for c in &self.cols {
            write!(f, " {}", c)?;
        }
        writeln!(f)?;
        for (r, row) in self.entries.iter().enumerate() {
            write!(f, "{}:", self.rows[r])?;
            for v in row {
                write!(f, " {}", format_rat(v))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Assembles the matrix of L_k on V(n) column by column from the
/// differential action, expanded over the Q-basis.
pub fn matrix_of_l(k: i32, n: u32) -> OperatorMatrix {
    let target = n as i64 - 2 * k as i64;
    let rows = partitions_of_degree(target);
    let cols = strict_partitions_of(n, PartFilter::All);
    let mut entries = vec![vec![rat(0); cols.len()]; rows.len()];
    for (ci, lambda) in cols.iter().enumerate() {
        let image = l_action_expansion(k, lambda);
        for (mu, _) in image.terms() {
            assert_eq!(mu.size() as i64, target, "grading violated by L_{k}");
        }
        for (ri, mu) in rows.iter().enumerate() {
            entries[ri][ci] = image.coefficient(mu);
        }
    }
    OperatorMatrix {
        k,
        source_degree: n,
        rows,
        cols,
        entries,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    e: Vec<Vec<Rat>>,
}

fn raw_matrix_of_l(k: i32, n: i64) -> RawMatrix {
    let source = partitions_of_degree(n);
    let target = partitions_of_degree(n - 2 * k as i64);
    let mut e = vec![vec![rat(0); source.len()]; target.len()];
    for (ci, lambda) in source.iter().enumerate() {
        let image = l_action_expansion(k, lambda);
        for (ri, mu) in target.iter().enumerate() {
            e[ri][ci] = image.coefficient(mu);
        }
    }
    RawMatrix {
        rows: target.len(),
        cols: source.len(),
        e,
    }
}

fn mat_mul(a: &RawMatrix, b: &RawMatrix) -> RawMatrix {
    assert_eq!(a.cols, b.rows, "matrix shape mismatch");
    let mut e = vec![vec![rat(0); b.cols]; a.rows];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut s = rat(0);
            for t in 0..a.cols {
                s += &a.e[i][t] * &b.e[t][j];
            }
            *cell = s;
        }
    }
    RawMatrix {
        rows: a.rows,
        cols: b.cols,
        e,
    }
}

fn mat_sub(a: &RawMatrix, b: &RawMatrix) -> RawMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let e = a
        .e
        .iter()
        .zip(&b.e)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect();
    RawMatrix {
        rows: a.rows,
        cols: a.cols,
        e,
    }
}

fn mat_scale(a: &RawMatrix, c: &Rat) -> RawMatrix {
    let e = a
        .e
        .iter()
        .map(|row| row.iter().map(|x| x * c).collect())
        .collect();
    RawMatrix {
        rows: a.rows,
        cols: a.cols,
        e,
    }
}

/// The Virasoro relation as an exact matrix identity on V(n):
/// M(L_k) M(L_l) - M(L_l) M(L_k) = 2(k-l) M(L_(k+l)) + ((k^3-k)/3) delta Id.
/// Intermediate degrees below zero contribute zero maps.
pub fn check_virasoro_bracket(k: i32, l: i32, n: u32) -> bool {
    let n = n as i64;
    let kl = mat_mul(&raw_matrix_of_l(k, n - 2 * l as i64), &raw_matrix_of_l(l, n));
    let lk = mat_mul(&raw_matrix_of_l(l, n - 2 * k as i64), &raw_matrix_of_l(k, n));
    let lhs = mat_sub(&kl, &lk);
    let mut rhs = mat_scale(&raw_matrix_of_l(k + l, n), &rat(2 * (k - l) as i64));
    if k + l == 0 {
        let central = frac((k as i64).pow(3) - k as i64, 3);
        for i in 0..rhs.rows {
            rhs.e[i][i] += &central;
        }
    }
    lhs == rhs
}

/// Contravariance of the inner product: <L_k v, w> = <v, L_(-k) w> for all
/// basis pairs v in V(n), w in V(n-2k). Vacuously true when n < 2k.
pub fn check_contravariance(k: u32, n: u32) -> bool {
    let target = n as i64 - 2 * k as i64;
    if target < 0 {
        return true;
    }
    let upstairs = strict_partitions_of(n, PartFilter::All);
    let downstairs = strict_partitions_of(target as u32, PartFilter::All);
    for lambda in &upstairs {
        let image = act_diff(k as i32, &q_lambda(lambda));
        for mu in &downstairs {
            let lhs = image.inner_product(&q_lambda(mu));
            let rhs = q_lambda(lambda).inner_product(&act_diff(-(k as i32), &q_lambda(mu)));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// The span of { Q_lambda : all parts of lambda even } is preserved by
/// L_(-1), L_0, L_1: every partition in the expanded image of such a basis
/// vector again has all parts even.
pub fn check_even_invariance(n: u32) -> bool {
    for lambda in strict_partitions_of(n, PartFilter::EvenPartsOnly) {
        for k in [-1i32, 0, 1] {
            let image = l_action_expansion(k, &lambda);
            if image.terms().any(|(mu, _)| !mu.all_parts_even()) {
                return false;
            }
        }
    }
    true
}

/// The product rule for the lowering operators:
/// L_(-k)(vw) = (L_(-k)v) w + v (L_(-k)w)
///   - (1/2) sum_(j=0..k-1) (-1)^j (k-j) Q_(2k-j, j) v w.
pub fn check_product_rule(k: u32, v: &OddPolynomial, w: &OddPolynomial) -> bool {
    assert!(k >= 1, "product rule applies to the lowering operators");
    let vw = v * w;
    let lhs = act_diff(-(k as i32), &vw);
    let mut rhs = &(&act_diff(-(k as i32), v) * w) + &(v * &act_diff(-(k as i32), w));
    for j in 0..k {
        let sign = if j % 2 == 0 { 1i64 } else { -1 };
        let coeff = frac(-sign * (k - j) as i64, 2);
        let qp = q_of_sequence(&IndexSequence::new(vec![(2 * k - j) as i64, j as i64]))
            .expect("non-negative");
        rhs = &rhs + &(&qp * &vw).scale(&coeff);
    }
    lhs == rhs
}

/// The generators of central charge 1 are this multiple of L_k. Kept as a
/// documented constant; L_k is the primitive normalization everywhere here.
pub fn reduced_generator_scale() -> Rat {
    frac(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{q, q_pair};

    fn sp(parts: &[u32]) -> StrictPartition {
        StrictPartition::new(parts.to_vec()).unwrap()
    }

    fn t(j: u32) -> OddPolynomial {
        OddPolynomial::var(j)
    }

    #[test]
    fn lowering_operators_on_the_constant() {
        // L_(-1) 1 = (1/4) t1^2
        let quarter_t1sq = (&t(1) * &t(1)).scale(&frac(1, 4));
        assert_eq!(act_diff(-1, &OddPolynomial::one()), quarter_t1sq);
        // L_(-2) 1 = (3/2) t1 t3
        let expected = (&t(1) * &t(3)).scale(&frac(3, 2));
        assert_eq!(act_diff(-2, &OddPolynomial::one()), expected);
    }

    #[test]
    fn lowering_q1_gives_the_displayed_combination() {
        // L_(-1) q_1 = 2 q_3 - (1/2) Q_(2,1)
        let lhs = act_diff(-1, &q(1));
        let rhs = &q(3).scale(&rat(2)) - &q_pair(2, 1).unwrap().scale(&frac(1, 2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn l0_scales_by_degree_plus_eighth() {
        for n in 0..=8u32 {
            for lambda in strict_partitions_of(n, PartFilter::All) {
                let p = q_lambda(&lambda);
                let expected = p.scale(&(rat(n as i64) + frac(1, 8)));
                assert_eq!(act_diff(0, &p), expected);
            }
        }
    }

    #[test]
    fn raising_kills_q31() {
        assert!(act_diff(1, &q_lambda(&sp(&[3, 1]))).is_zero());
    }

    #[test]
    fn grading_is_respected() {
        for n in 0..=7u32 {
            for lambda in strict_partitions_of(n, PartFilter::All) {
                for k in -3i32..=3 {
                    let image = act_diff(k, &q_lambda(&lambda));
                    let target = n as i64 - 2 * k as i64;
                    if image.is_zero() {
                        continue;
                    }
                    assert!(image.is_homogeneous());
                    assert_eq!(image.degree() as i64, target);
                }
            }
        }
    }

    #[test]
    fn closed_lowering_examples() {
        let e = QExpansion::single(sp(&[1]), rat(1));
        let lowered = act_closed_lower(1, &e);
        let mut expected = QExpansion::empty();
        expected.add_term(sp(&[3]), rat(2));
        expected.add_term(sp(&[2, 1]), frac(-1, 2));
        assert_eq!(lowered, expected);

        let lowered2 = act_closed_lower(2, &e);
        let mut expected2 = QExpansion::empty();
        expected2.add_term(sp(&[5]), rat(3));
        expected2.add_term(sp(&[4, 1]), rat(-1));
        assert_eq!(lowered2, expected2);

        assert!(act_closed_lower(1, &QExpansion::empty()).is_empty());
    }

    #[test]
    fn closed_raising_examples() {
        assert!(act_closed_raise(1, &QExpansion::single(sp(&[3, 1]), rat(1))).is_empty());
        assert_eq!(
            act_closed_raise(1, &QExpansion::single(sp(&[3]), rat(1))),
            QExpansion::single(sp(&[1]), rat(2))
        );
        assert!(act_closed_raise(2, &QExpansion::single(sp(&[2]), rat(1))).is_empty());
        // terms that land on the empty partition survive as constants
        assert_eq!(
            act_closed_raise(1, &QExpansion::single(sp(&[2]), rat(1))),
            QExpansion::single(StrictPartition::empty(), rat(1))
        );
    }

    #[test]
    fn closed_actions_match_the_operator_oracle_spot() {
        for (parts, k) in [
            (&[5, 3][..], 2u32),
            (&[5, 3, 1][..], 2),
            (&[4, 2][..], 1),
            (&[4, 2, 1][..], 1),
            (&[6][..], 3),
        ] {
            let lambda = sp(parts);
            let e = QExpansion::single(lambda.clone(), rat(1));
            let diff_raise = expand_in_q(&act_diff(k as i32, &q_lambda(&lambda)));
            assert_eq!(diff_raise, act_closed_raise(k, &e), "raise {lambda} k={k}");
            let diff_lower = expand_in_q(&act_diff(-(k as i32), &q_lambda(&lambda)));
            assert_eq!(diff_lower, act_closed_lower(k, &e), "lower {lambda} k={k}");
        }
    }

    #[test]
    fn lowering_formulas_on_q_n() {
        for n in 0..=6u32 {
            let lhs = act_diff(-1, &q(n));
            let tail = q_of_sequence(&IndexSequence::new(vec![n as i64, 2])).unwrap();
            let rhs = &q(n + 2).scale(&rat(n as i64 + 1)) + &tail.scale(&frac(1, 2));
            assert_eq!(lhs, rhs, "L_(-1) q_{n}");

            let lhs2 = act_diff(-2, &q(n));
            let t4 = q_of_sequence(&IndexSequence::new(vec![n as i64, 4])).unwrap();
            let t31 = q_of_sequence(&IndexSequence::new(vec![n as i64, 3, 1])).unwrap();
            let rhs2 = &(&q(n + 4).scale(&rat(n as i64 + 2)) + &t4) - &t31.scale(&frac(1, 2));
            assert_eq!(lhs2, rhs2, "L_(-2) q_{n}");
        }
    }

    #[test]
    fn matrix_examples() {
        let m = matrix_of_l(0, 3);
        assert_eq!(m.rows(), m.cols());
        for (r, row) in m.entries().iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let expected = if r == c { frac(25, 8) } else { rat(0) };
                assert_eq!(v, &expected);
            }
        }

        let m = matrix_of_l(1, 4);
        assert_eq!(m.rows(), &[sp(&[2])]);
        assert_eq!(m.cols(), &[sp(&[4]), sp(&[3, 1])]);
        assert_eq!(m.entries(), &[vec![rat(3), rat(0)]]);

        let m = matrix_of_l(-1, 0);
        assert_eq!(m.rows(), &[sp(&[2])]);
        assert_eq!(m.cols(), &[StrictPartition::empty()]);
        assert_eq!(m.entries(), &[vec![frac(1, 2)]]);
        assert_eq!(m.target_degree(), 2);
    }

    #[test]
    fn matrix_json_shape() {
        let m = matrix_of_l(1, 4);
        let json = m.to_json();
        assert_eq!(json["k"], 1);
        assert_eq!(json["n"], 4);
        assert_eq!(json["rows"], serde_json::json!([[2]]));
        assert_eq!(json["cols"], serde_json::json!([[4], [3, 1]]));
        assert_eq!(json["entries"], serde_json::json!([["3", "0"]]));
    }

    #[test]
    fn bracket_spot_checks() {
        assert!(check_virasoro_bracket(1, -1, 4));
        assert!(check_virasoro_bracket(2, -2, 6));
        assert!(check_virasoro_bracket(0, 0, 5));
        assert!(check_virasoro_bracket(3, -1, 4));
        assert!(check_virasoro_bracket(-2, 1, 3));
    }

    #[test]
    fn contravariance_spot_checks() {
        assert!(check_contravariance(1, 4));
        assert!(check_contravariance(3, 6));
        assert!(check_contravariance(2, 1), "vacuous case");
    }

    #[test]
    fn even_span_is_invariant() {
        for n in [0u32, 4, 6] {
            assert!(check_even_invariance(n), "even invariance at n={n}");
        }
    }

    #[test]
    fn product_rule_displays() {
        assert!(check_product_rule(1, &q(1), &q(1)));
        assert!(check_product_rule(2, &q(1), &q(2)));
        let v = OddPolynomial::sample(11, 4);
        let w = OddPolynomial::sample(23, 4);
        assert!(check_product_rule(3, &v, &w));
    }

    #[test]
    fn rescaled_generators_have_central_charge_one() {
        // [l_k, l_l] with l_k = (1/2) L_k carries central term (1/4)(k^3-k)/3
        // = (k^3 - k)/12, the charge-1 normalization for these indices.
        assert_eq!(reduced_generator_scale(), frac(1, 2));
    }
}
