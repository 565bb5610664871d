mod common;

use cascadix::Rational;
use common::orientation::{associativity, basis_independence, reversal};

#[test]
fn associativity_rational() {
    associativity::<Rational>(11, 200).unwrap();
}

#[test]
fn associativity_float() {
    associativity::<f64>(12, 200).unwrap();
}

#[test]
fn basis_independence_rational() {
    basis_independence::<Rational>(21, 200, false).unwrap();
}

#[test]
fn basis_independence_float() {
    basis_independence::<f64>(22, 200, true).unwrap();
}

#[test]
fn reversal_rational() {
    reversal::<Rational>(31, 200).unwrap();
}

#[test]
fn reversal_float() {
    reversal::<f64>(32, 200).unwrap();
}
