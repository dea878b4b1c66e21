//! Run-time extractor selection.

use serde_json::Value;

use super::{
    BitExp, BitExpState, ConstantPlus, Extractor, ExtractorKind, MultiBitFast, MultiBitListsState, MultiBitNaive,
    MultiBitState, Output, OutputKind, Sign, TableExtractor, Threshold, ThresholdState,
};
use crate::classifier::{check_hnk, check_nk_plus, mvr_witness};
use crate::error::{GsvError, Result};
use crate::model::{SourceSpec, Witness};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub enum AnyExtractor {
    Threshold(Threshold),
    BitExp(BitExp),
    MultibitNaive(MultiBitNaive),
    MultibitFast(MultiBitFast),
    Table(TableExtractor),
    Constant(ConstantPlus),
}

#[derive(Debug, Clone)]
pub enum AnyState {
    Threshold(ThresholdState),
    BitExp(BitExpState),
    MultibitNaive(MultiBitState),
    MultibitFast(MultiBitListsState),
    Table(usize),
    Constant,
}

impl Extractor for AnyExtractor {
    type State = AnyState;

    fn start(&self) -> AnyState {
        match self {
            AnyExtractor::Threshold(e) => AnyState::Threshold(e.start()),
            AnyExtractor::BitExp(e) => AnyState::BitExp(e.start()),
            AnyExtractor::MultibitNaive(e) => AnyState::MultibitNaive(e.start()),
            AnyExtractor::MultibitFast(e) => AnyState::MultibitFast(e.start()),
            AnyExtractor::Table(e) => AnyState::Table(e.start()),
            AnyExtractor::Constant(_) => AnyState::Constant,
        }
    }

    fn absorb(&self, state: &mut AnyState, face: usize) {
        match (self, state) {
            (AnyExtractor::Threshold(e), AnyState::Threshold(s)) => e.absorb(s, face),
            (AnyExtractor::BitExp(e), AnyState::BitExp(s)) => e.absorb(s, face),
            (AnyExtractor::MultibitNaive(e), AnyState::MultibitNaive(s)) => e.absorb(s, face),
            (AnyExtractor::MultibitFast(e), AnyState::MultibitFast(s)) => e.absorb(s, face),
            (AnyExtractor::Table(e), AnyState::Table(s)) => e.absorb(s, face),
            (AnyExtractor::Constant(_), AnyState::Constant) => {}
            _ => panic!("extractor state of the wrong variant"),
        }
    }

    fn output(&self, state: &AnyState) -> Output {
        match (self, state) {
            (AnyExtractor::Threshold(e), AnyState::Threshold(s)) => e.output(s),
            (AnyExtractor::BitExp(e), AnyState::BitExp(s)) => e.output(s),
            (AnyExtractor::MultibitNaive(e), AnyState::MultibitNaive(s)) => e.output(s),
            (AnyExtractor::MultibitFast(e), AnyState::MultibitFast(s)) => e.output(s),
            (AnyExtractor::Table(e), AnyState::Table(s)) => e.output(s),
            (AnyExtractor::Constant(e), AnyState::Constant) => e.output(&()),
            _ => panic!("extractor state of the wrong variant"),
        }
    }

    fn output_kind(&self) -> OutputKind {
        match self {
            AnyExtractor::Threshold(e) => e.output_kind(),
            AnyExtractor::BitExp(e) => e.output_kind(),
            AnyExtractor::MultibitNaive(e) => e.output_kind(),
            AnyExtractor::MultibitFast(e) => e.output_kind(),
            AnyExtractor::Table(e) => e.output_kind(),
            AnyExtractor::Constant(e) => e.output_kind(),
        }
    }
}

impl AnyState {
    /// Short human-readable summary of the state for transcripts.
    pub fn summary(&self) -> String {
        use crate::rational::format;
        match self {
            AnyState::Threshold(s) => format!("z={} frozen={}", format(&s.z), s.frozen),
            AnyState::BitExp(s) => format!("z={}", format(&s.z)),
            AnyState::MultibitNaive(s) => {
                format!("top={} z_top={}", s.top(), format(&s.value(s.top())))
            }
            AnyState::MultibitFast(s) => {
                let top = s.promoted().into_iter().map(|(v, _)| v).max();
                format!(
                    "top={} z_top={} runs={}",
                    s.output_index(),
                    top.map(|v| format(&v)).unwrap_or_default(),
                    s.stored_runs()
                )
            }
            AnyState::Table(i) => format!("prefix={i}"),
            AnyState::Constant => String::new(),
        }
    }
}

/// Builds a named extractor over the witness it needs: the NK+ witness for
/// `bit-exp` and the multi-bit extractors, the MVR witness at `epsilon` for
/// `threshold`.
pub fn select(
    spec: &SourceSpec,
    kind: ExtractorKind,
    epsilon: Option<&Rational>,
    m: usize,
) -> Result<(AnyExtractor, Witness)> {
    if kind == ExtractorKind::Threshold {
        let eps = epsilon.ok_or_else(|| GsvError::Parameter("the threshold extractor needs --epsilon".into()))?;
        let witness = mvr_witness(spec, eps)?;
        return Ok((AnyExtractor::Threshold(Threshold::new(&witness.values, eps)?), witness));
    }
    let nk_plus = check_nk_plus(spec);
    let witness = match nk_plus.witness {
        Some(w) if nk_plus.holds => w,
        _ => {
            return Err(if check_hnk(spec)?.holds {
                GsvError::NotNkPlus { extractor: kind.as_str() }
            } else {
                GsvError::NotHnk
            })
        }
    };
    let psi = &witness.values;
    let ext = match kind {
        ExtractorKind::BitExp => AnyExtractor::BitExp(BitExp::new(psi)?),
        ExtractorKind::MultibitNaive => AnyExtractor::MultibitNaive(MultiBitNaive::new(psi, m)?),
        ExtractorKind::MultibitFast => AnyExtractor::MultibitFast(MultiBitFast::new(psi, m)?),
        ExtractorKind::Threshold => unreachable!(),
    };
    Ok((ext, witness))
}

/// Parses a truth table: `{"outputs": [1, -1, ...]}` for `±1` outputs, or
/// `{"m": k, "outputs": [i, ...]}` for indices in `[2^k]`. The table length
/// must be a power of `faces`.
pub fn table_from_json(text: &str, faces: usize) -> Result<TableExtractor> {
    let value: Value = serde_json::from_str(text).map_err(|e| GsvError::Parse(format!("extractor table: {e}")))?;
    let outputs = value
        .get("outputs")
        .and_then(Value::as_array)
        .ok_or_else(|| GsvError::Parse("extractor table needs an \"outputs\" array".into()))?;
    let m = value.get("m").and_then(Value::as_u64).map(|m| m as usize);
    let parsed = outputs
        .iter()
        .map(|o| {
            let x = o
                .as_i64()
                .ok_or_else(|| GsvError::Parse("extractor table outputs must be integers".into()))?;
            match m {
                None => match x {
                    1 => Ok(Output::Bit(Sign::Plus)),
                    -1 => Ok(Output::Bit(Sign::Minus)),
                    _ => Err(GsvError::Parse(format!("bit output {x} is not ±1"))),
                },
                Some(m) if m <= 62 && x >= 0 && (x as u64) < (1u64 << m) => Ok(Output::Index(x as u64)),
                Some(m) => Err(GsvError::Parse(format!("index output {x} outside [2^{m}]"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut n = 0;
    let mut size = 1usize;
    while size < parsed.len() && faces > 1 {
        size = size.saturating_mul(faces);
        n += 1;
    }
    let kind = m.map_or(OutputKind::Bit, |m| OutputKind::Index { m });
    TableExtractor::new(faces, n, parsed, kind)
}
