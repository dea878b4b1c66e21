//! Direct multi-bit extractor: `2^m` coupled martingales, one per output.
//!
//! Coordinates are ranked ascending by value; equal values keep the order
//! they had before the step (initially coordinate order). The coordinate of
//! rank `j` (1-based) moves by `(-1)^j z_j * ψ/2` for `j < M`, and the top
//! coordinate absorbs the negated sum so the total stays 1. The output is
//! the top-ranked coordinate after the last step.
//!
//! All coordinates share one denominator, so ranking compares integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{checked_psi, Extractor, Output, OutputKind, NAIVE_M_LIMIT};
use crate::error::{GsvError, Result};
use crate::rational::Rational;

const NORMALIZE_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiBitState {
    numer: Vec<BigInt>,
    denom: BigInt,
    /// `order[r]` is the coordinate of rank `r` (0-based, ascending).
    order: Vec<usize>,
    m: usize,
    steps: usize,
}

impl MultiBitState {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > NAIVE_M_LIMIT {
            return Err(GsvError::MLimit { m, limit: NAIVE_M_LIMIT });
        }
        let size = 1usize << m;
        Ok(MultiBitState {
            numer: vec![BigInt::one(); size],
            denom: BigInt::from(size),
            order: (0..size).collect(),
            m,
            steps: 0,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.numer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numer.is_empty()
    }

    pub fn z(&self) -> Vec<Rational> {
        self.numer.iter().map(|n| Rational::new(n.clone(), self.denom.clone())).collect()
    }

    pub fn value(&self, j: usize) -> Rational {
        Rational::new(self.numer[j].clone(), self.denom.clone())
    }

    /// Coordinates by ascending rank.
    pub fn ranking(&self) -> &[usize] {
        &self.order
    }

    pub fn top(&self) -> usize {
        *self.order.last().expect("at least two coordinates")
    }

    /// The update direction for the next step, over the current denominator.
    fn direction_numer(&self) -> Vec<BigInt> {
        let size = self.len();
        let mut d = vec![BigInt::zero(); size];
        let mut total = BigInt::zero();
        for (r, &j) in self.order[..size - 1].iter().enumerate() {
            // rank r + 1 is even exactly when r is odd
            let v = if r % 2 == 1 { self.numer[j].clone() } else { -&self.numer[j] };
            total += &v;
            d[j] = v;
        }
        d[self.top()] = -total;
        d
    }

    /// The vector `d` the next step adds (scaled by ψ/2).
    pub fn direction(&self) -> Vec<Rational> {
        self.direction_numer()
            .into_iter()
            .map(|n| Rational::new(n, self.denom.clone()))
            .collect()
    }

    pub fn step(&mut self, psi_value: &Rational) {
        self.steps += 1;
        if psi_value.is_zero() {
            return;
        }
        let d = self.direction_numer();
        let p = psi_value.numer();
        let two_q = psi_value.denom() * 2;
        for (x, dx) in self.numer.iter_mut().zip(&d) {
            *x = &*x * &two_q + p * dx;
        }
        self.denom *= &two_q;
        let numer = &self.numer;
        self.order.sort_by(|&a, &b| numer[a].cmp(&numer[b]));
        if self.steps.is_multiple_of(NORMALIZE_EVERY) {
            self.normalize();
        }
    }

    fn normalize(&mut self) {
        let g = self.numer.iter().fold(self.denom.clone(), |g, x| g.gcd(x));
        if g > BigInt::one() {
            for x in self.numer.iter_mut() {
                *x = &*x / &g;
            }
            self.denom = &self.denom / &g;
        }
    }

    /// Exact check of the probability-vector invariant.
    pub fn is_distribution(&self) -> bool {
        self.numer.iter().all(Signed::is_positive) && self.numer.iter().sum::<BigInt>() == self.denom
    }
}

pub fn multibit_step_naive(state: &MultiBitState, psi_value: &Rational) -> MultiBitState {
    let mut next = state.clone();
    next.step(psi_value);
    next
}

/// Big-endian `m`-bit string of the top coordinate.
pub fn multibit_extract_naive(psi: &[Rational], faces: &[usize], m: usize) -> Result<String> {
    Ok(MultiBitNaive::new(psi, m)?.extract(faces).bits(m))
}

#[derive(Debug, Clone)]
pub struct MultiBitNaive {
    psi: Vec<Rational>,
    m: usize,
}

impl MultiBitNaive {
    pub fn new(psi: &[Rational], m: usize) -> Result<Self> {
        MultiBitState::new(m)?;
        Ok(MultiBitNaive { psi: checked_psi(psi)?, m })
    }
}

impl Extractor for MultiBitNaive {
    type State = MultiBitState;

    fn start(&self) -> MultiBitState {
        MultiBitState::new(self.m).expect("m validated")
    }
    fn absorb(&self, state: &mut MultiBitState, face: usize) {
        state.step(&self.psi[face]);
    }
    fn output(&self, state: &MultiBitState) -> Output {
        Output::Index(state.top() as u64)
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Index { m: self.m }
    }
}
