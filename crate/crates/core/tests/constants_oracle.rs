//! Constants against the fixed-point oracle.

mod common;

use common::oracle::*;
use pinchlab::constants::{self, ConstantError, EpsilonBranch, ScalarSign};

#[test]
fn oracle_reproduces_frozen_decimal_values() {
    // 30-digit references from an independent decimal evaluation
    let c4 = oracle_c(4).0.to_string();
    assert!(c4.starts_with("5569826071192066293208582787550"), "{c4}");
    let c6 = oracle_c(6).0.to_string();
    assert!(c6.starts_with("6554193040264889346035133950743"), "{c6}");
    let c5 = oracle_c(5).0.to_string();
    assert!(c5.starts_with("6148351653462074326507246686"), "{c5}");
    let c8 = oracle_c(8).0.to_string();
    assert!(c8.starts_with("7142531592929235003330450241"), "{c8}");
    let e6 = oracle_eps_large(6).0.to_string();
    assert!(e6.starts_with("22016695953540077418002450034"), "{e6}");
}

#[test]
fn cubic_constant_and_e_match_oracle() {
    for n in 3..=12 {
        assert_close("C", constants::c_cubic(n as usize).unwrap(), &oracle_c(n));
        assert_close("E", constants::e_const(n as usize).unwrap(), &oracle_e(n));
    }
}

#[test]
fn a_constant_matches_oracle() {
    for n in 3..=12 {
        assert_close("A+", constants::a_const(n as usize, ScalarSign::NonNeg).unwrap(), &Fx::ratio(1, n - 1));
        assert_close("A-", constants::a_const(n as usize, ScalarSign::Neg).unwrap(), &Fx::ratio(2, n));
    }
}

#[test]
fn epsilon_branches_match_oracle() {
    for n in [4i64, 5] {
        let p = n as f64 / 2.0;
        assert_close("eps critical", constants::epsilon_auto(n as usize, p).unwrap(), &oracle_eps_critical(n));
        let upper = constants::epsilon_upper_exponent(n as usize);
        assert_close("eps large", constants::epsilon_auto(n as usize, upper).unwrap(), &oracle_eps_large(n));
        assert_close("eps large", constants::epsilon_auto(n as usize, 7.0).unwrap(), &oracle_eps_large(n));
    }
    for (n, pn, pd) in [(4i64, 5i64, 2i64), (4, 3, 1), (4, 7, 2), (5, 11, 4), (5, 3, 1), (5, 13, 4)] {
        let p = pn as f64 / pd as f64;
        assert_eq!(constants::epsilon_branch(n as usize, p).unwrap(), EpsilonBranch::Intermediate);
        assert_close("eps intermediate", constants::epsilon_auto(n as usize, p).unwrap(), &oracle_eps_intermediate(n, pn, pd));
    }
    for n in 6..=12 {
        for p in [n as f64 / 2.0, n as f64, 3.0 * n as f64] {
            assert_close("eps large", constants::epsilon_auto(n as usize, p).unwrap(), &oracle_eps_large(n));
        }
    }
}

#[test]
fn einstein_sphere_and_weitzenbock_constants_match_oracle() {
    for n in 4..=12 {
        assert_close("C1", constants::c1_einstein(n as usize).unwrap(), &oracle_c1(n));
        assert_close("C2", constants::c2_sphere(n as usize).unwrap(), &oracle_c2(n));
    }
    assert_close("C3", constants::c3_weitzenbock(4).unwrap(), &oracle_c2(4));
    assert_close("C3", constants::c3_weitzenbock(5).unwrap(), &oracle_c2(5));
}

#[test]
fn low_dimension_c1_is_below_the_high_dimension_formula() {
    for n in [4i64, 5] {
        let high = Fx::int(1).div(&Fx::int(2 * (n - 2) * (n - 1)).sqrt()).to_f64();
        assert!(constants::c1_einstein(n as usize).unwrap() < high);
    }
}

#[test]
fn branch_domain_violations_are_rejected() {
    assert!(matches!(constants::epsilon_auto(4, 1.9), Err(ConstantError::ExponentBelowCritical { .. })));
    assert!(matches!(constants::epsilon_auto(6, 2.5), Err(ConstantError::ExponentBelowCritical { .. })));
    assert!(matches!(constants::c3_weitzenbock(6), Err(ConstantError::Dimension { .. })));
    assert!(matches!(
        constants::epsilon_with_branch(6, 4.0, EpsilonBranch::Intermediate),
        Err(ConstantError::BranchDomain { .. })
    ));
    assert!(matches!(
        constants::epsilon_with_branch(4, 4.0, EpsilonBranch::Intermediate),
        Err(ConstantError::BranchDomain { .. })
    ));
    assert!(constants::epsilon_auto(4, f64::NAN).is_err());
}

#[test]
fn constants_are_positive_on_their_domains() {
    for n in 4..=20usize {
        for c in constants::all_constants(n, Some(n as f64), ScalarSign::NonNeg) {
            if let Ok(v) = c.value {
                assert!(v > 0.0, "{} at n={n}", c.name);
            }
        }
    }
}
