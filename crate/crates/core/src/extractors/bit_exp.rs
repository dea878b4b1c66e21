//! Single-bit extractor with multiplicative step size:
//! `z <- z + (ψ/2)(1 - |z|)`, output `sign(z)`.

use num_traits::{One, Signed, Zero};

use super::{checked_psi, Extractor, Output, OutputKind, Sign};
use crate::error::Result;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitExpState {
    pub z: Rational,
    pub steps: usize,
}

impl Default for BitExpState {
    fn default() -> Self {
        BitExpState { z: Rational::zero(), steps: 0 }
    }
}

impl BitExpState {
    /// Distance `1 - |z|` to the nearest endpoint.
    pub fn distance(&self) -> Rational {
        Rational::one() - self.z.abs()
    }
}

pub fn bit_exp_step(state: &BitExpState, psi_value: &Rational) -> BitExpState {
    let z = &state.z + psi_value / int(2) * state.distance();
    BitExpState { z, steps: state.steps + 1 }
}

/// Only guaranteed to be nearly unbiased when `psi` is an NK+ witness.
pub fn bit_extract_exp(psi: &[Rational], faces: &[usize]) -> Result<Sign> {
    Ok(BitExp::new(psi)?.extract(faces).sign().expect("bit output"))
}

#[derive(Debug, Clone)]
pub struct BitExp {
    psi: Vec<Rational>,
}

impl BitExp {
    pub fn new(psi: &[Rational]) -> Result<Self> {
        Ok(BitExp { psi: checked_psi(psi)? })
    }
}

impl Extractor for BitExp {
    type State = BitExpState;

    fn start(&self) -> BitExpState {
        BitExpState::default()
    }
    fn absorb(&self, state: &mut BitExpState, face: usize) {
        *state = bit_exp_step(state, &self.psi[face]);
    }
    fn output(&self, state: &BitExpState) -> Output {
        Output::Bit(Sign::of(&state.z))
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Bit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn at(z: Rational) -> BitExpState {
        BitExpState { z, steps: 0 }
    }

    #[test]
    fn step_examples() {
        assert_eq!(bit_exp_step(&at(int(0)), &int(1)).z, frac(1, 2));
        assert_eq!(bit_exp_step(&at(frac(1, 2)), &int(1)).z, frac(3, 4));
        assert_eq!(bit_exp_step(&at(frac(1, 2)), &int(-1)).z, frac(1, 4));
    }

    #[test]
    fn extract_examples() {
        let psi = [int(1), int(-1)];
        assert_eq!(bit_extract_exp(&psi, &[0, 0]).unwrap(), Sign::Plus);
        assert_eq!(bit_extract_exp(&psi, &[0, 1]).unwrap(), Sign::Plus);
        assert_eq!(bit_extract_exp(&psi, &[]).unwrap(), Sign::Plus);
        assert_eq!(bit_extract_exp(&psi, &[1]).unwrap(), Sign::Minus);
    }

    proptest! {
        #[test]
        fn distance_changes_by_bounded_factor(
            values in proptest::collection::vec((-8i64..=8, 1i64..=8), 1..40)
        ) {
            let mut state = BitExpState::default();
            for (p, q) in values {
                let p = p.clamp(-q, q);
                let next = bit_exp_step(&state, &frac(p, q));
                prop_assert!(next.z.abs() < Rational::one());
                let (d0, d1) = (state.distance(), next.distance());
                prop_assert!(d1 >= &d0 / int(2));
                prop_assert!(d1 <= &d0 * frac(3, 2));
                state = next;
            }
        }
    }
}
