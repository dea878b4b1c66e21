//! Named example sources.
//!
//! `e1` has three dice over four faces: a fair coin on the first two faces
//! and a two-face SV pair hidden on the last two.

use crate::error::{GsvError, Result};
use crate::model::{Die, SourceSpec};
use crate::rational::{frac, int, Rational};

fn labelled(labels: &[&str], dice: Vec<Vec<Rational>>) -> SourceSpec {
    SourceSpec::new(
        labels.iter().map(|s| s.to_string()).collect(),
        dice.into_iter().map(Die::new).collect(),
    )
    .expect("preset sources are valid")
}

pub fn e1() -> SourceSpec {
    labelled(
        &["a", "b", "c", "d"],
        vec![
            vec![frac(1, 2), frac(1, 2), int(0), int(0)],
            vec![int(0), int(0), frac(1, 3), frac(2, 3)],
            vec![int(0), int(0), frac(2, 3), frac(1, 3)],
        ],
    )
}

pub fn e2() -> SourceSpec {
    labelled(
        &["a", "b", "c", "d"],
        vec![
            vec![frac(1, 2), frac(1, 2), int(0), int(0)],
            vec![frac(1, 4), frac(1, 12), frac(1, 3), frac(1, 3)],
            vec![frac(1, 12), frac(1, 4), frac(1, 3), frac(1, 3)],
        ],
    )
}

pub fn fair_coin() -> SourceSpec {
    labelled(&["h", "t"], vec![vec![frac(1, 2), frac(1, 2)]])
}

/// Two-face SV source: dice `(1/2 + delta, 1/2 - delta)` and its mirror.
pub fn sv_pair(delta: &Rational) -> SourceSpec {
    let half = frac(1, 2);
    labelled(
        &["h", "t"],
        vec![
            vec![&half + delta, &half - delta],
            vec![&half - delta, &half + delta],
        ],
    )
}

/// Point mass on the third face plus a fair coin on the first two.
pub fn two_dice() -> SourceSpec {
    labelled(
        &["a", "b", "c"],
        vec![vec![int(0), int(0), int(1)], vec![frac(1, 2), frac(1, 2), int(0)]],
    )
}

pub const PRESETS: &[&str] = &["e1", "e2", "fair-coin", "sv", "two-dice"];

/// Resolves `e1`, `e2`, `fair-coin`, `two-dice`, `sv` (delta 1/4) or
/// `sv:<delta>`.
pub fn preset(name: &str) -> Result<SourceSpec> {
    match name {
        "e1" => Ok(e1()),
        "e2" => Ok(e2()),
        "fair-coin" => Ok(fair_coin()),
        "two-dice" => Ok(two_dice()),
        "sv" => Ok(sv_pair(&frac(1, 4))),
        _ => {
            if let Some(delta) = name.strip_prefix("sv:") {
                let delta = crate::rational::parse(delta)?;
                if delta < int(0) || delta > frac(1, 2) {
                    return Err(GsvError::Parameter("sv delta must lie in [0, 1/2]".into()));
                }
                return Ok(sv_pair(&delta));
            }
            Err(GsvError::Parameter(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    }
}
