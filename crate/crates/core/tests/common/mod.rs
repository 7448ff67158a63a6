//! Dense oracles built independently of the crate's kernels: Kronecker
//! products of 2x2 Pauli matrices and a scaling-and-squaring Taylor
//! exponential.

#![allow(dead_code)]

use ecprep::qcore::PauliSum;
use ecprep::{Pauli, PauliString, StateVector, C64};
use nalgebra::{DMatrix, DVector};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli_2x2(p: Pauli) -> DMatrix<C64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `P_{n-1} (x) ... (x) P_0`: site 0 is the least significant bit.
pub fn dense_string(s: &PauliString) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for &p in s.axes().iter().rev() {
        m = m.kronecker(&pauli_2x2(p));
    }
    m
}

pub fn dense_sum(h: &PauliSum) -> DMatrix<C64> {
    let d = h.dim();
    let mut m = DMatrix::zeros(d, d);
    for t in h.terms() {
        m += dense_string(&t.string) * c(t.coefficient, 0.0);
    }
    m
}

/// `exp(a)` by scaling and squaring with a 30-term Taylor series.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.5 {
        s += 1;
    }
    let b = a / c(f64::powi(2.0, s), 0.0);
    let n = a.nrows();
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut out = term.clone();
    for k in 1..30 {
        term = &term * &b / c(k as f64, 0.0);
        out += &term;
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}

pub fn to_vec(s: &StateVector) -> DVector<C64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn parse(s: &str) -> PauliString {
    s.parse().unwrap()
}
