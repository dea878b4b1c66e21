//! Frozen random walk: add ψ-values until `|z|` reaches the threshold `M`,
//! then output the sign.
//!
//! `M` is the integer ceiling of `1/sqrt(epsilon)`. A step is skipped when the
//! walk was already at or beyond `M` before it, so `|z| <= M + 1` always.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{checked_psi, Extractor, Output, OutputKind, Sign};
use crate::error::{GsvError, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdState {
    pub z: Rational,
    pub m_threshold: Rational,
    pub frozen: bool,
}

impl ThresholdState {
    pub fn new(m_threshold: Rational) -> Self {
        let frozen = m_threshold <= Rational::zero();
        ThresholdState { z: Rational::zero(), m_threshold, frozen }
    }
}

pub fn threshold_step(state: &ThresholdState, psi_value: &Rational) -> ThresholdState {
    if state.frozen {
        return state.clone();
    }
    let z = &state.z + psi_value;
    let frozen = z.abs() >= state.m_threshold;
    ThresholdState { z, m_threshold: state.m_threshold.clone(), frozen }
}

pub fn threshold_extract(psi: &[Rational], epsilon: &Rational, faces: &[usize]) -> Result<Sign> {
    let ext = Threshold::new(psi, epsilon)?;
    Ok(ext.extract(faces).sign().expect("bit output"))
}

#[derive(Debug, Clone)]
pub struct Threshold {
    psi: Vec<Rational>,
    m_threshold: Rational,
}

impl Threshold {
    pub fn new(psi: &[Rational], epsilon: &Rational) -> Result<Self> {
        if !epsilon.is_positive() || *epsilon >= rational::int(1) {
            return Err(GsvError::Parameter("threshold extractor needs epsilon in (0, 1)".into()));
        }
        let m = rational::ceil_sqrt_recip(epsilon)?;
        Ok(Threshold { psi: checked_psi(psi)?, m_threshold: Rational::from_integer(m) })
    }

    pub fn m_threshold(&self) -> &Rational {
        &self.m_threshold
    }
}

impl Extractor for Threshold {
    type State = ThresholdState;

    fn start(&self) -> ThresholdState {
        ThresholdState::new(self.m_threshold.clone())
    }
    fn absorb(&self, state: &mut ThresholdState, face: usize) {
        *state = threshold_step(state, &self.psi[face]);
    }
    fn output(&self, state: &ThresholdState) -> Output {
        Output::Bit(Sign::of(&state.z))
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Bit
    }
}

/// The threshold walk on the integer lattice `z * L`, where `L` is the common
/// denominator of the ψ-values. Bit-identical to [`Threshold`]; meant for
/// long Monte-Carlo runs.
#[derive(Debug, Clone)]
pub struct IntegerThreshold {
    steps: Vec<i64>,
    limit: i64,
}

impl IntegerThreshold {
    pub fn new(psi: &[Rational], epsilon: &Rational) -> Result<Self> {
        let exact = Threshold::new(psi, epsilon)?;
        let scale = rational::common_denominator(psi);
        let too_big = || GsvError::Parameter("ψ lattice does not fit in 64-bit integers".into());
        let steps = psi
            .iter()
            .map(|v| (v.numer() * (&scale / v.denom())).to_i64().ok_or_else(too_big))
            .collect::<Result<Vec<_>>>()?;
        let limit = (exact.m_threshold.to_integer() * &scale).to_i64().ok_or_else(too_big)?;
        // |z| stays below limit + max step, which must not overflow.
        if limit.checked_mul(4).is_none() {
            return Err(too_big());
        }
        Ok(IntegerThreshold { steps, limit })
    }

    #[inline]
    pub fn step(&self, z: i64, face: usize) -> i64 {
        if z.abs() >= self.limit {
            z
        } else {
            z + self.steps[face]
        }
    }

    #[inline]
    pub fn is_frozen(&self, z: i64) -> bool {
        z.abs() >= self.limit
    }

    pub fn scale_of(psi: &[Rational]) -> BigInt {
        rational::common_denominator(psi)
    }
}
