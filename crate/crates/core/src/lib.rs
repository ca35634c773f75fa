//! Exact calculus for Schur Q-functions realized as polynomials in the odd
//! variables t_1, t_3, t_5, ..., together with the reduced Fock representation
//! of the Virasoro algebra acting on them.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere. The crate provides two independent realizations of
//! the Virasoro action — normal-ordered differential operators on the
//! polynomial ring, and closed-form combinatorial rules on the Q-basis — so
//! each can serve as an oracle for the other. A small Hirota-bilinear layer
//! evaluates Q-function equations on exact soliton tau functions.
//!
//! Module map:
//! - [`partitions`]: strict partitions, index sequences, straightening rules.
//! - [`polyring`]: the sparse polynomial ring, inner product, and
//!   normal-ordered differential operators.
//! - [`qcalc`]: q_n, two-row Q_ab, Pfaffians, Q_lambda, Q-basis expansion,
//!   and the quadratic-relation identity checkers.
//! - [`virasoro`]: the operators L_k in both realizations, operator matrices,
//!   and structural checks (bracket, contravariance, invariance).
//! - [`hirota`]: bilinear evaluation on exponential sums, KdV soliton tau
//!   functions, and the conjecture probe.

pub mod error;
pub mod hirota;
pub mod partitions;
pub mod polyring;
pub mod qcalc;
pub mod rat;
pub mod virasoro;

pub use error::Error;
pub use hirota::{
    conjecture_probe, hirota_apply, kdv_tau, to_hirota, validate_kdv_tau, Exponent,
    ExponentialSum, HirotaPolynomial, ProbeRecord, ProbeReport,
};
pub use partitions::{
    strict_partitions_of, IndexSequence, PartFilter, StraightenResult, StrictPartition,
};
pub use polyring::{DiffOperator, Monomial, OddPolynomial};
pub use qcalc::{
    check_append_expansion, check_quadratic_t_identity, check_quadratic_relation, expand_in_q, pfaffian, q, q_lambda,
    q_norm_sq, q_of_sequence, q_pair, AlternatingPolyMatrix, AppendCase, QExpansion,
};
pub use rat::Rat;
pub use virasoro::{
    act_closed_lower, act_closed_raise, act_diff, build_l, check_contravariance,
    check_even_invariance, check_product_rule, check_virasoro_bracket, matrix_of_l,
    reduced_generator_scale, OperatorMatrix,
};
