//! Published closed-form claims, checked exactly.

use melkit::exact::{int, Rational};
use melkit::melnikov::{rewrite_I, rewrite_J, BasisTerm, Family, Ladder, Term};
use melkit::quadrature::{quad_I, quad_J};
use melkit::zeros::{jacobian_rank, rank_D_piecewise, rank_D_smooth};

fn terms(list: &[(BasisTerm, i64)]) -> Vec<(BasisTerm, Rational)> {
    let mut v: Vec<_> = list.iter().map(|(e, c)| (*e, int(*c))).collect();
    v.sort_by_key(|(e, _)| *e);
    v
}

fn sorted(rhs: &[Term]) -> Vec<(BasisTerm, Rational)> {
    let mut v: Vec<_> = rhs.iter().map(|t| (t.element, t.coeff.clone())).collect();
    v.sort_by_key(|(e, _)| *e);
    v
}

#[test]
fn single_step_identities() {
    let rel = rewrite_I(0, 0, 0);
    assert_eq!(rel.lhs, BasisTerm::i(0, 3));
    assert_eq!(
        sorted(&rel.rhs),
        terms(&[(BasisTerm::i(1, 1), 6), (BasisTerm::i(1, 3), 1), (BasisTerm::i(2, 1), -3)])
    );
    let rel = rewrite_J(0, 1, 0).unwrap();
    assert_eq!(rel.lhs, BasisTerm::j(0, 4));
    assert_eq!(
        sorted(&rel.rhs),
        terms(&[(BasisTerm::j(1, 2), 8), (BasisTerm::j(1, 4), 1), (BasisTerm::j(2, 2), -4)])
    );
}

#[test]
fn odd_power_j_is_half_of_i() {
    let tol = 1e-12;
    let i = quad_I(1, 1, 0.5, tol).unwrap().value;
    let j = quad_J(1, 1, 0.5, tol).unwrap().value;
    assert!((j - i / 2.0).abs() <= 10.0 * tol * i);
}

#[test]
fn tail_matrix_of_size_two_has_full_rank_for_any_n() {
    for n in 1..=8 {
        assert_eq!(rank_D_smooth(n, 3, 0).unwrap().rank, 2);
        assert_eq!(rank_D_piecewise(n, 3, 1).unwrap().rank, 2);
    }
}

#[test]
fn one_and_two_block_jacobians_are_lower_triangular() {
    let r = jacobian_rank(Family::Smooth, Ladder::odd(2, 0, 1), 1).unwrap();
    assert_eq!((r.matrix.rows(), r.rank), (3, 3));
    assert!(r.lower_triangular && r.diagonal_nonzero);

    let r = jacobian_rank(Family::Smooth, Ladder::odd(1, 0, 2), 1).unwrap();
    assert_eq!(r.rank, 4);
    assert!(r.lower_triangular && r.diagonal_nonzero);

    let r = jacobian_rank(Family::Piecewise, Ladder::even(1, 1, 2), 1).unwrap();
    assert_eq!(r.rank, 4);
    assert!(r.lower_triangular && r.diagonal_nonzero);
}
