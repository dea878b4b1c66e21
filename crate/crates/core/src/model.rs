//! Source types, witnesses, adaptive strategies, and sampling.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{GsvError, Result};
use crate::rational::{self, Rational};

/// A probability distribution over the face alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Die {
    #[serde(with = "rational::serde_vec")]
    pub probs: Vec<Rational>,
}

impl Die {
    pub fn new(probs: Vec<Rational>) -> Self {
        Die { probs }
    }

    pub fn arity(&self) -> usize {
        self.probs.len()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        support(self)
    }
}

pub fn die_mean(d: &Die, psi: &[Rational]) -> Result<Rational> {
    check_arity(d.arity(), psi.len())?;
    Ok(d.probs
        .iter()
        .zip(psi)
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, x)| p * x)
        .sum())
}

pub fn die_var(d: &Die, psi: &[Rational]) -> Result<Rational> {
    let mean = die_mean(d, psi)?;
    let second: Rational = d
        .probs
        .iter()
        .zip(psi)
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, x)| p * x * x)
        .sum();
    Ok(second - &mean * &mean)
}

pub fn support(d: &Die) -> BTreeSet<usize> {
    d.probs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_positive())
        .map(|(i, _)| i)
        .collect()
}

fn check_arity(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(GsvError::Dimension { expected, actual });
    }
    Ok(())
}

/// A GSV source type: a face alphabet and a finite set of dice over it.
///
/// Deserialization does not validate; use [`SourceSpec::from_json`] or
/// [`validate_source`] before handing a parsed spec to the classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(rename = "faces")]
    pub face_labels: Vec<String>,
    pub dice: Vec<Die>,
}

impl SourceSpec {
    /// Builds and validates a spec.
    pub fn new(face_labels: Vec<String>, dice: Vec<Die>) -> Result<Self> {
        let spec = SourceSpec { face_labels, dice };
        let report = validate_source(&spec);
        if report.is_valid() {
            Ok(spec)
        } else {
            Err(GsvError::InvalidSource(report.violations))
        }
    }

    /// Builds a spec with faces labelled `0, 1, ...`.
    pub fn from_dice(dice: Vec<Vec<Rational>>) -> Result<Self> {
        let faces = dice.first().map_or(0, Vec::len);
        let labels = (0..faces).map(|i| i.to_string()).collect();
        SourceSpec::new(labels, dice.into_iter().map(Die::new).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SourceSpec =
            serde_json::from_str(text).map_err(|e| GsvError::Parse(e.to_string()))?;
        let report = validate_source(&spec);
        if report.is_valid() {
            Ok(spec)
        } else {
            Err(GsvError::InvalidSource(report.violations))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn num_faces(&self) -> usize {
        self.face_labels.len()
    }

    pub fn num_dice(&self) -> usize {
        self.dice.len()
    }

    /// The sub-source on `faces` using only `dice`, with probabilities
    /// restricted to those faces.
    pub fn restrict(&self, dice: &[usize], faces: &[usize]) -> SourceSpec {
        SourceSpec {
            face_labels: faces.iter().map(|&f| self.face_labels[f].clone()).collect(),
            dice: dice
                .iter()
                .map(|&d| Die::new(faces.iter().map(|&f| self.dice[d].probs[f].clone()).collect()))
                .collect(),
        }
    }

    /// Union of the supports of the given dice, ascending.
    pub fn support_of(&self, dice: &[usize]) -> Vec<usize> {
        let mut faces = BTreeSet::new();
        for &d in dice {
            faces.extend(support(&self.dice[d]));
        }
        faces.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    NegativeProb { die: usize, face: usize },
    SumNotOne { die: usize, sum: String },
    OrphanFace { face: usize },
    ArityMismatch { die: usize, expected: usize, actual: usize },
    NoFaces,
    NoDice,
    DuplicateLabel { label: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeProb { die, face } => {
                write!(f, "NEGATIVE_PROB: die {die} face {face}")
            }
            Violation::SumNotOne { die, sum } => write!(f, "SUM_NOT_ONE: die {die} sums to {sum}"),
            Violation::OrphanFace { face } => write!(f, "ORPHAN_FACE: face {face}"),
            Violation::ArityMismatch { die, expected, actual } => write!(
                f,
                "ARITY_MISMATCH: die {die} has {actual} entries, expected {expected}"
            ),
            Violation::NoFaces => f.write_str("NO_FACES"),
            Violation::NoDice => f.write_str("NO_DICE"),
            Violation::DuplicateLabel { label } => write!(f, "DUPLICATE_LABEL: {label:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_source(spec: &SourceSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let faces = spec.face_labels.len();
    if faces == 0 {
        violations.push(Violation::NoFaces);
    }
    if spec.dice.is_empty() {
        violations.push(Violation::NoDice);
    }
    let mut seen = BTreeSet::new();
    for label in &spec.face_labels {
        if !seen.insert(label.as_str()) {
            violations.push(Violation::DuplicateLabel { label: label.clone() });
        }
    }
    let mut covered = vec![false; faces];
    for (i, die) in spec.dice.iter().enumerate() {
        if die.arity() != faces {
            violations.push(Violation::ArityMismatch {
                die: i,
                expected: faces,
                actual: die.arity(),
            });
            continue;
        }
        for (f, p) in die.probs.iter().enumerate() {
            if p.is_negative() {
                violations.push(Violation::NegativeProb { die: i, face: f });
            } else if p.is_positive() {
                covered[f] = true;
            }
        }
        let sum: Rational = die.probs.iter().sum();
        if !sum.is_one() {
            violations.push(Violation::SumNotOne { die: i, sum: rational::format(&sum) });
        }
    }
    if !spec.dice.is_empty() {
        for (f, c) in covered.iter().enumerate() {
            if !c {
                violations.push(Violation::OrphanFace { face: f });
            }
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WitnessKind {
    Nk,
    NkPlus,
    HnkSubset,
    Mvr,
    Mvd,
}

/// A face function with values in `[-1, 1]`, tagged with what it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "rational::serde_vec")]
    pub values: Vec<Rational>,
    pub kind: WitnessKind,
    #[serde(default, with = "rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    #[serde(default, with = "rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub min_variance: Option<Rational>,
}

impl Witness {
    pub fn new(values: Vec<Rational>, kind: WitnessKind) -> Result<Self> {
        check_unit_range(&values)?;
        Ok(Witness { values, kind, epsilon: None, min_variance: None })
    }

    /// Attaches `min_d Var_d[psi]` computed over `spec`.
    pub fn with_min_variance(mut self, spec: &SourceSpec) -> Result<Self> {
        self.min_variance = Some(min_variance(spec, &self.values)?);
        Ok(self)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

pub fn check_unit_range(values: &[Rational]) -> Result<()> {
    let one = Rational::one();
    for (f, v) in values.iter().enumerate() {
        if v.abs() > one {
            return Err(GsvError::Parameter(format!(
                "witness value {} at face {f} lies outside [-1, 1]",
                rational::format(v)
            )));
        }
    }
    Ok(())
}

pub fn min_variance(spec: &SourceSpec, psi: &[Rational]) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for d in &spec.dice {
        let v = die_var(d, psi)?;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    best.ok_or_else(|| GsvError::Parameter("source has no dice".into()))
}

/// Rescales a nonzero vector so that `max |v| = 1` and its first nonzero
/// entry is positive. The zero vector is returned unchanged.
pub fn normalize(values: &[Rational]) -> Vec<Rational> {
    let max = values.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    if max.is_zero() {
        return values.to_vec();
    }
    let first_negative = values.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    let scale = if first_negative { -max.recip() } else { max.recip() };
    values.iter().map(|v| v * &scale).collect()
}

/// An adaptive adversary: picks the next die from the faces seen so far.
///
/// Implementations must be deterministic.
pub trait Strategy {
    fn choose(&self, history: &[usize]) -> usize;
}

impl<S: Strategy + ?Sized> Strategy for &S {
    fn choose(&self, history: &[usize]) -> usize {
        (**self).choose(history)
    }
}

impl<S: Strategy + ?Sized> Strategy for Box<S> {
    fn choose(&self, history: &[usize]) -> usize {
        (**self).choose(history)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantDie(pub usize);

impl Strategy for ConstantDie {
    fn choose(&self, _history: &[usize]) -> usize {
        self.0
    }
}

/// Wraps a closure as a strategy.
pub struct FnStrategy<F>(pub F);

impl<F: Fn(&[usize]) -> usize> Strategy for FnStrategy<F> {
    fn choose(&self, history: &[usize]) -> usize {
        (self.0)(history)
    }
}

/// Explicit strategy tree. The node reached by following `history` names the
/// die; histories running past the leaves reuse the deepest node's die.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTree {
    pub die: usize,
    pub children: Vec<StrategyTree>,
}

impl StrategyTree {
    pub fn leaf(die: usize) -> Self {
        StrategyTree { die, children: Vec::new() }
    }

    /// Depth of the deepest decision node, counting the root as 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(StrategyTree::depth).max().unwrap_or(0)
    }

    pub fn node(&self, history: &[usize]) -> &StrategyTree {
        let mut node = self;
        for &f in history {
            match node.children.get(f) {
                Some(child) => node = child,
                None => break,
            }
        }
        node
    }

    /// Full tree of depth `n` in which every node plays `die`.
    pub fn constant(die: usize, faces: usize, n: usize) -> Self {
        let children = if n <= 1 {
            Vec::new()
        } else {
            (0..faces).map(|_| StrategyTree::constant(die, faces, n - 1)).collect()
        };
        StrategyTree { die, children }
    }

    /// Materializes any strategy into a full tree of depth `n`.
    pub fn from_strategy(strategy: &dyn Strategy, faces: usize, n: usize) -> Self {
        fn build(s: &dyn Strategy, faces: usize, n: usize, history: &mut Vec<usize>) -> StrategyTree {
            let die = s.choose(history);
            let mut children = Vec::new();
            if history.len() + 1 < n {
                for f in 0..faces {
                    history.push(f);
                    children.push(build(s, faces, n, history));
                    history.pop();
                }
            }
            StrategyTree { die, children }
        }
        build(strategy, faces, n.max(1), &mut Vec::new())
    }

    /// Nested-object form keyed by face label, `"die"` at every node.
    pub fn to_json(&self, labels: &[String]) -> Value {
        let mut map = Map::new();
        map.insert("die".into(), Value::from(self.die));
        for (child, label) in self.children.iter().zip(labels) {
            map.insert(label.clone(), child.to_json(labels));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value, labels: &[String]) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| GsvError::Parse("strategy node must be an object".into()))?;
        let die = obj
            .get("die")
            .and_then(Value::as_u64)
            .ok_or_else(|| GsvError::Parse("strategy node lacks a \"die\" index".into()))?
            as usize;
        for key in obj.keys() {
            if key != "die" && !labels.contains(key) {
                return Err(GsvError::Parse(format!("unknown face label {key:?} in strategy")));
            }
        }
        let present = labels.iter().filter(|l| obj.contains_key(*l)).count();
        let children = if present == 0 {
            Vec::new()
        } else if present == labels.len() {
            labels
                .iter()
                .map(|l| StrategyTree::from_json(&obj[l], labels))
                .collect::<Result<_>>()?
        } else {
            return Err(GsvError::Parse(
                "strategy node must list either all faces or none".into(),
            ));
        };
        Ok(StrategyTree { die, children })
    }

    pub fn max_die(&self) -> usize {
        self.children.iter().map(StrategyTree::max_die).fold(self.die, usize::max)
    }
}

impl Strategy for StrategyTree {
    fn choose(&self, history: &[usize]) -> usize {
        self.node(history).die
    }
}

/// Exact inverse-CDF sampler: face `i` is drawn when a uniform 64-bit `u`
/// satisfies `u < ceil(cdf_i * 2^64)`.
#[derive(Debug, Clone)]
pub struct Sampler {
    /// Row-major thresholds, with `2^64` stored as `u64::MAX`.
    thresholds: Vec<u64>,
    /// Per die, the first face whose threshold is `2^64`.
    last: Vec<usize>,
    /// Per die, the face owning each of the 256 top-byte buckets of `u`, or
    /// `NO_GUIDE` when a threshold splits the bucket.
    guide: Vec<u16>,
    faces: usize,
}

const NO_GUIDE: u16 = u16::MAX;

impl Sampler {
    pub fn new(spec: &SourceSpec) -> Self {
        let scale = Rational::from_integer(BigInt::one() << 64usize);
        let full = BigInt::one() << 64usize;
        let faces = spec.num_faces();
        let mut thresholds = Vec::with_capacity(faces * spec.num_dice());
        let mut last = Vec::with_capacity(spec.num_dice());
        for die in &spec.dice {
            let mut cum = Rational::zero();
            let mut first_full = None;
            for (i, p) in die.probs.iter().enumerate() {
                cum += p;
                let t = (&cum * &scale).ceil().to_integer();
                if t >= full {
                    first_full.get_or_insert(i);
                    thresholds.push(u64::MAX);
                } else {
                    thresholds.push(t.to_u64().expect("cdf within [0, 1]"));
                }
            }
            last.push(first_full.unwrap_or(faces - 1));
        }
        let mut sampler = Sampler { thresholds, last, guide: Vec::new(), faces };
        let guide = (0..spec.num_dice())
            .flat_map(|d| {
                let sampler = &sampler;
                (0..256u64).map(move |k| {
                    let (lo, hi) = (k << 56, (k << 56) | ((1u64 << 56) - 1));
                    let face = sampler.draw_exact(d, lo);
                    if face == sampler.draw_exact(d, hi) && face < NO_GUIDE as usize {
                        face as u16
                    } else {
                        NO_GUIDE
                    }
                })
            })
            .collect();
        sampler.guide = guide;
        sampler
    }

    pub fn num_dice(&self) -> usize {
        self.last.len()
    }

    #[inline]
    pub fn draw(&self, die: usize, u: u64) -> usize {
        match self.guide[die * 256 + (u >> 56) as usize] {
            NO_GUIDE => self.draw_exact(die, u),
            face => face as usize,
        }
    }

    fn draw_exact(&self, die: usize, u: u64) -> usize {
        // thresholds are sorted: the first `t > u` sits after every `t <= u`
        let row = &self.thresholds[die * self.faces..(die + 1) * self.faces];
        let below = row.iter().map(|&t| usize::from(t <= u)).sum::<usize>();
        below.min(self.last[die])
    }
}

pub fn sample_sequence(
    spec: &SourceSpec,
    strategy: &dyn Strategy,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let sampler = Sampler::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut faces = Vec::with_capacity(n);
    for _ in 0..n {
        let die = strategy.choose(&faces);
        if die >= spec.num_dice() {
            return Err(GsvError::Strategy { die, dice: spec.num_dice() });
        }
        faces.push(sampler.draw(die, rng.next_u64()));
    }
    Ok(faces)
}
