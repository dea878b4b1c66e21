//! Streaming extractors.
//!
//! Each extractor is a state machine over ψ-values; the face → ψ mapping is
//! applied at the [`Extractor`] boundary so the step functions can be driven
//! with synthetic streams.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{GsvError, Result};
use crate::model::check_unit_range;
use crate::rational::Rational;

pub mod any;
pub mod bit_exp;
pub mod multibit_fast;
pub mod multibit_naive;
pub mod threshold;

pub use any::{select, table_from_json, AnyExtractor, AnyState};
pub use bit_exp::{bit_exp_step, bit_extract_exp, BitExp, BitExpState};
pub use multibit_fast::{multibit_extract_fast, MultiBitFast, MultiBitListsState};
pub use multibit_naive::{multibit_extract_naive, multibit_step_naive, MultiBitNaive, MultiBitState};
pub use threshold::{threshold_extract, threshold_step, IntegerThreshold, Threshold, ThresholdState};

/// Largest output length accepted by the naive multi-bit extractor.
pub const NAIVE_M_LIMIT: usize = 20;
/// Largest output length accepted by the list-based multi-bit extractor.
pub const FAST_M_LIMIT: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// `sign(0) = +1`.
    pub fn of(value: &Rational) -> Sign {
        if *value < Rational::from_integer(0.into()) {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Bit(Sign),
    Index(u64),
}

impl Output {
    /// Position in `[2^m]`: `-1 -> 0`, `+1 -> 1` for bits.
    pub fn index(self) -> u64 {
        match self {
            Output::Bit(Sign::Minus) => 0,
            Output::Bit(Sign::Plus) => 1,
            Output::Index(i) => i,
        }
    }

    pub fn sign(self) -> Option<Sign> {
        match self {
            Output::Bit(s) => Some(s),
            Output::Index(_) => None,
        }
    }

    /// Big-endian `m`-bit string of [`Output::index`].
    pub fn bits(self, m: usize) -> String {
        format_bits(self.index(), m)
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Bit(s) => write!(f, "{}", s.value()),
            Output::Index(i) => write!(f, "{i}"),
        }
    }
}

pub fn format_bits(index: u64, m: usize) -> String {
    (0..m).rev().map(|b| if (index >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Bit,
    Index { m: usize },
}

/// A deterministic extractor consuming faces one at a time.
pub trait Extractor {
    type State: Clone;

    fn start(&self) -> Self::State;
    fn absorb(&self, state: &mut Self::State, face: usize);
    fn output(&self, state: &Self::State) -> Output;
    fn output_kind(&self) -> OutputKind;

    fn extract(&self, faces: &[usize]) -> Output {
        let mut state = self.start();
        for &f in faces {
            self.absorb(&mut state, f);
        }
        self.output(&state)
    }
}

impl<E: Extractor + ?Sized> Extractor for &E {
    type State = E::State;

    fn start(&self) -> Self::State {
        (**self).start()
    }
    fn absorb(&self, state: &mut Self::State, face: usize) {
        (**self).absorb(state, face)
    }
    fn output(&self, state: &Self::State) -> Output {
        (**self).output(state)
    }
    fn output_kind(&self) -> OutputKind {
        (**self).output_kind()
    }
}

/// Extractor selection as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractorKind {
    Threshold,
    BitExp,
    MultibitNaive,
    MultibitFast,
}

impl ExtractorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtractorKind::Threshold => "threshold",
            ExtractorKind::BitExp => "bit-exp",
            ExtractorKind::MultibitNaive => "multibit-naive",
            ExtractorKind::MultibitFast => "multibit-fast",
        }
    }

    pub fn is_multibit(self) -> bool {
        matches!(self, ExtractorKind::MultibitNaive | ExtractorKind::MultibitFast)
    }
}

impl FromStr for ExtractorKind {
    type Err = GsvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(ExtractorKind::Threshold),
            "bit-exp" => Ok(ExtractorKind::BitExp),
            "multibit-naive" => Ok(ExtractorKind::MultibitNaive),
            "multibit-fast" => Ok(ExtractorKind::MultibitFast),
            _ => Err(GsvError::Parameter(format!(
                "unknown extractor {s:?}; expected threshold, bit-exp, multibit-naive or multibit-fast"
            ))),
        }
    }
}

/// Explicit truth table over `F^n`, indexed by the base-`|F|` reading of the
/// face sequence (first face most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableExtractor {
    pub faces: usize,
    pub n: usize,
    pub outputs: Vec<Output>,
    pub kind: OutputKind,
}

impl TableExtractor {
    pub fn new(faces: usize, n: usize, outputs: Vec<Output>, kind: OutputKind) -> Result<Self> {
        let expected = (faces as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if outputs.len() as u128 != expected {
            return Err(GsvError::Dimension { expected: expected as usize, actual: outputs.len() });
        }
        Ok(TableExtractor { faces, n, outputs, kind })
    }

    /// Table of `±1` outputs from the bits of `mask`, leaf `i` reading bit `i`.
    pub fn from_mask(faces: usize, n: usize, mask: u64) -> Self {
        let leaves = faces.pow(n as u32);
        let outputs = (0..leaves)
            .map(|i| Output::Bit(if (mask >> i) & 1 == 1 { Sign::Plus } else { Sign::Minus }))
            .collect();
        TableExtractor { faces, n, outputs, kind: OutputKind::Bit }
    }

    /// Tabulates another extractor on all `|F|^n` sequences.
    pub fn tabulate<E: Extractor>(ext: &E, faces: usize, n: usize) -> Self {
        let leaves = faces.pow(n as u32);
        let mut outputs = Vec::with_capacity(leaves);
        let mut seq = vec![0usize; n];
        for i in 0..leaves {
            let mut x = i;
            for slot in seq.iter_mut().rev() {
                *slot = x % faces;
                x /= faces;
            }
            outputs.push(ext.extract(&seq));
        }
        TableExtractor { faces, n, outputs, kind: ext.output_kind() }
    }
}

impl Extractor for TableExtractor {
    type State = usize;

    fn start(&self) -> usize {
        0
    }
    fn absorb(&self, state: &mut usize, face: usize) {
        *state = *state * self.faces + face;
    }
    fn output(&self, state: &usize) -> Output {
        self.outputs[*state]
    }
    fn output_kind(&self) -> OutputKind {
        self.kind
    }
}

/// Ext ≡ +1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantPlus;

impl Extractor for ConstantPlus {
    type State = ();

    fn start(&self) {}
    fn absorb(&self, _state: &mut (), _face: usize) {}
    fn output(&self, _state: &()) -> Output {
        Output::Bit(Sign::Plus)
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Bit
    }
}

pub(crate) fn checked_psi(values: &[Rational]) -> Result<Vec<Rational>> {
    check_unit_range(values)?;
    Ok(values.to_vec())
}
