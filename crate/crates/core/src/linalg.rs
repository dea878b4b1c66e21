//! Fraction-free Gauss-Jordan elimination over the integers.
//!
//! Rational rows are cleared of denominators first; elimination then runs on
//! `BigInt` rows, dividing each row by the gcd of its entries after every
//! update so entry sizes stay bounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::rational::{common_denominator, Rational};

/// Row-reduced integer matrix: every pivot column is zero outside its pivot
/// row, and `pivots[r]` is the pivot column of row `r`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Reduced {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = common_denominator(row);
    row.iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && g != BigInt::from(1) {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

pub fn reduce(rows: &[Vec<Rational>], cols: usize) -> Reduced {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        if m[r][c].is_negative() {
            for v in m[r].iter_mut() {
                *v = -&*v;
            }
        }
        primitive(&mut m[r]);
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let a = m[r][c].clone();
            let b = m[i][c].clone();
            let pivot_row = m[r].clone();
            for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                *x = &a * &*x - &b * y;
            }
            primitive(&mut m[i]);
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Reduced { rows: m, pivots, cols }
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    reduce(rows, cols).rank()
}

/// Basis of `{x : rows * x = 0}`, one vector per free column.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let red = reduce(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !red.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![Rational::zero(); cols];
            x[fc] = Rational::from_integer(BigInt::from(1));
            for (row, &pc) in red.rows.iter().zip(&red.pivots) {
                x[pc] = -Rational::new(row[fc].clone(), row[pc].clone());
            }
            x
        })
        .collect()
}

/// A solution of `a * x = b` with free variables set to zero, if any exists.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len());
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
        .collect();
    let red = reduce(&augmented, cols + 1);
    if red.pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &pc) in red.rows.iter().zip(&red.pivots) {
        x[pc] = Rational::new(row[cols].clone(), row[pc].clone());
    }
    Some(x)
}
