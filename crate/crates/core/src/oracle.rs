//! Exact worst-case analysis of extractors against adaptive adversaries.
//!
//! Every routine walks the game tree depth-first, cloning the extractor's
//! streaming state at each branch, so no `|F|^n` table is materialized.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{GsvError, Result};
use crate::extractors::{Extractor, Output, OutputKind, Sign};
use crate::model::{Strategy, SourceSpec, StrategyTree};
use crate::rational::{self, int, Rational};

/// Default bound on `|F|^n` for tree walks.
pub const DEFAULT_TREE_GUARD: u128 = 100_000_000;
/// Bound on the number of strategy trees enumerated by the exhaustive mode.
pub const STRATEGY_ENUM_GUARD: u128 = 1_000_000;
/// Environment variable overriding [`DEFAULT_TREE_GUARD`].
pub const TREE_GUARD_ENV: &str = "GSV_TREE_GUARD";

pub fn tree_guard() -> Result<u128> {
    match std::env::var(TREE_GUARD_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u128>()
            .map_err(|_| GsvError::Parameter(format!("{TREE_GUARD_ENV} must be a non-negative integer, got {text:?}"))),
        Err(_) => Ok(DEFAULT_TREE_GUARD),
    }
}

/// `|F|^n`, saturating.
pub fn leaf_count(faces: usize, n: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(faces as u128);
    }
    total
}

pub fn check_tree(spec: &SourceSpec, n: usize) -> Result<()> {
    let guard = tree_guard()?;
    if leaf_count(spec.num_faces(), n) > guard {
        return Err(GsvError::TreeLimit { faces: spec.num_faces(), n, guard });
    }
    Ok(())
}

/// An extractor evaluated on exactly `n` samples.
#[derive(Debug, Clone)]
pub struct ExtractorTable<E> {
    pub ext: E,
    pub n: usize,
}

impl<E: Extractor> ExtractorTable<E> {
    pub fn new(ext: E, n: usize) -> Self {
        ExtractorTable { ext, n }
    }

    pub fn eval(&self, faces: &[usize]) -> Result<Output> {
        if faces.len() != self.n {
            return Err(GsvError::Dimension { expected: self.n, actual: faces.len() });
        }
        Ok(self.ext.extract(faces))
    }

    pub fn output_kind(&self) -> OutputKind {
        self.ext.output_kind()
    }
}

fn require_bits<E: Extractor>(table: &ExtractorTable<E>) -> Result<()> {
    match table.output_kind() {
        OutputKind::Bit => Ok(()),
        OutputKind::Index { .. } => Err(GsvError::OutputKind { expected: "±1" }),
    }
}

fn sign_value(out: Output) -> Rational {
    match out {
        Output::Bit(s) => int(s.value()),
        Output::Index(_) => unreachable!("checked by require_bits"),
    }
}

fn dot(probs: &[Rational], values: &[Rational]) -> Rational {
    probs
        .iter()
        .zip(values)
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, v)| p * v)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasReport {
    pub max_expectation: Rational,
    pub min_expectation: Rational,
    pub bias: Rational,
    pub max_strategy: StrategyTree,
    pub min_strategy: StrategyTree,
}

impl BiasReport {
    pub fn to_json(&self, labels: &[String]) -> Value {
        json!({
            "max_expectation": rational::format(&self.max_expectation),
            "min_expectation": rational::format(&self.min_expectation),
            "bias": rational::format(&self.bias),
            "max_strategy": self.max_strategy.to_json(labels),
            "min_strategy": self.min_strategy.to_json(labels),
        })
    }
}

struct Extremes {
    max: Rational,
    min: Rational,
    max_tree: Option<StrategyTree>,
    min_tree: Option<StrategyTree>,
}

fn extremes_rec<E: Extractor>(spec: &SourceSpec, table: &ExtractorTable<E>, depth: usize, state: &E::State) -> Extremes {
    if depth == table.n {
        let v = sign_value(table.ext.output(state));
        return Extremes { max: v.clone(), min: v, max_tree: None, min_tree: None };
    }
    let children: Vec<Extremes> = (0..spec.num_faces())
        .map(|f| {
            let mut next = state.clone();
            table.ext.absorb(&mut next, f);
            extremes_rec(spec, table, depth + 1, &next)
        })
        .collect();
    let maxes: Vec<Rational> = children.iter().map(|c| c.max.clone()).collect();
    let mins: Vec<Rational> = children.iter().map(|c| c.min.clone()).collect();
    let mut best: Option<(usize, Rational)> = None;
    let mut worst: Option<(usize, Rational)> = None;
    for (d, die) in spec.dice.iter().enumerate() {
        let hi = dot(&die.probs, &maxes);
        if best.as_ref().is_none_or(|(_, b)| hi > *b) {
            best = Some((d, hi));
        }
        let lo = dot(&die.probs, &mins);
        if worst.as_ref().is_none_or(|(_, w)| lo < *w) {
            worst = Some((d, lo));
        }
    }
    let (max_die, max) = best.expect("at least one die");
    let (min_die, min) = worst.expect("at least one die");
    let (max_trees, min_trees): (Vec<_>, Vec<_>) = children.into_iter().map(|c| (c.max_tree, c.min_tree)).unzip();
    Extremes {
        max,
        min,
        max_tree: Some(StrategyTree { die: max_die, children: max_trees.into_iter().flatten().collect() }),
        min_tree: Some(StrategyTree { die: min_die, children: min_trees.into_iter().flatten().collect() }),
    }
}

/// Largest and smallest `E[Ext]` over all adaptive strategies, with optimal
/// strategy trees (ties to the smallest die index).
pub fn exact_extremes<E: Extractor>(spec: &SourceSpec, table: &ExtractorTable<E>) -> Result<BiasReport> {
    require_bits(table)?;
    check_tree(spec, table.n)?;
    let root = extremes_rec(spec, table, 0, &table.ext.start());
    let bias = root.max.abs().max(root.min.abs());
    Ok(BiasReport {
        max_strategy: root.max_tree.unwrap_or_else(|| StrategyTree::leaf(0)),
        min_strategy: root.min_tree.unwrap_or_else(|| StrategyTree::leaf(0)),
        max_expectation: root.max,
        min_expectation: root.min,
        bias,
    })
}

fn checked_die(spec: &SourceSpec, strategy: &dyn Strategy, history: &[usize]) -> Result<usize> {
    let die = strategy.choose(history);
    if die >= spec.num_dice() {
        return Err(GsvError::Strategy { die, dice: spec.num_dice() });
    }
    Ok(die)
}

/// Exact `E[g(F_1..F_n)]` for a vector-valued leaf function under a fixed
/// strategy. Zero-probability branches are skipped.
pub fn expected_value<G>(spec: &SourceSpec, strategy: &dyn Strategy, n: usize, mut g: G) -> Result<Vec<Rational>>
where
    G: FnMut(&[usize]) -> Vec<Rational>,
{
    check_tree(spec, n)?;
    fn rec<G: FnMut(&[usize]) -> Vec<Rational>>(
        spec: &SourceSpec,
        strategy: &dyn Strategy,
        n: usize,
        history: &mut Vec<usize>,
        weight: &Rational,
        g: &mut G,
        acc: &mut Vec<Rational>,
    ) -> Result<()> {
        if history.len() == n {
            let values = g(history);
            if acc.is_empty() {
                acc.resize(values.len(), Rational::zero());
            }
            for (a, v) in acc.iter_mut().zip(values) {
                *a += weight * v;
            }
            return Ok(());
        }
        let die = checked_die(spec, strategy, history)?;
        for (f, p) in spec.dice[die].probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            history.push(f);
            rec(spec, strategy, n, history, &(weight * p), g, acc)?;
            history.pop();
        }
        Ok(())
    }
    let mut acc = Vec::new();
    rec(spec, strategy, n, &mut Vec::new(), &Rational::one(), &mut g, &mut acc)?;
    Ok(acc)
}

/// Exact output distribution under a fixed strategy.
pub fn output_distribution<E: Extractor>(
    spec: &SourceSpec,
    strategy: &dyn Strategy,
    table: &ExtractorTable<E>,
) -> Result<BTreeMap<Output, Rational>> {
    check_tree(spec, table.n)?;
    #[allow(clippy::too_many_arguments)]
    fn rec<E: Extractor>(
        spec: &SourceSpec,
        strategy: &dyn Strategy,
        table: &ExtractorTable<E>,
        history: &mut Vec<usize>,
        state: &E::State,
        weight: &Rational,
        dist: &mut BTreeMap<Output, Rational>,
    ) -> Result<()> {
        if history.len() == table.n {
            *dist.entry(table.ext.output(state)).or_insert_with(Rational::zero) += weight;
            return Ok(());
        }
        let die = checked_die(spec, strategy, history)?;
        for (f, p) in spec.dice[die].probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut next = state.clone();
            table.ext.absorb(&mut next, f);
            history.push(f);
            rec(spec, strategy, table, history, &next, &(weight * p), dist)?;
            history.pop();
        }
        Ok(())
    }
    let mut dist = BTreeMap::new();
    rec(spec, strategy, table, &mut Vec::new(), &table.ext.start(), &Rational::one(), &mut dist)?;
    Ok(dist)
}

/// `E[Ext]` of a `±1` distribution.
pub fn expectation(dist: &BTreeMap<Output, Rational>) -> Result<Rational> {
    dist.iter()
        .map(|(out, p)| match out {
            Output::Bit(s) => Ok(int(s.value()) * p),
            Output::Index(_) => Err(GsvError::OutputKind { expected: "±1" }),
        })
        .sum()
}

/// Total-variation distance to the uniform distribution on `2^m` outputs.
pub fn tv_distance(dist: &BTreeMap<Output, Rational>, m: usize) -> Result<Rational> {
    if m == 0 || m > 62 {
        return Err(GsvError::MLimit { m, limit: 62 });
    }
    let size = 1u64 << m;
    let uniform = Rational::new(1.into(), size.into());
    let mut total = Rational::zero();
    let mut seen = 0u64;
    for (out, p) in dist {
        if out.index() >= size {
            return Err(GsvError::Parameter(format!("output {} outside [2^{m}]", out.index())));
        }
        total += (p - &uniform).abs();
        seen += 1;
    }
    total += Rational::from_integer((size - seen).into()) * &uniform;
    Ok(total / int(2))
}

fn output_bits<E: Extractor>(table: &ExtractorTable<E>, m: usize) -> Result<()> {
    match table.output_kind() {
        OutputKind::Bit if m == 1 => Ok(()),
        OutputKind::Index { m: k } if k == m => Ok(()),
        _ => Err(GsvError::OutputKind { expected: "m-bit index" }),
    }
}

/// Number of decision nodes of a full strategy tree of depth `n`.
pub fn internal_nodes(faces: usize, n: usize) -> u128 {
    (0..n).map(|k| leaf_count(faces, k)).fold(0u128, u128::saturating_add)
}

/// Number of deterministic strategy trees of depth `n`, if it fits.
pub fn strategy_count(spec: &SourceSpec, n: usize) -> Option<u128> {
    let nodes = u32::try_from(internal_nodes(spec.num_faces(), n)).ok()?;
    (spec.num_dice() as u128).checked_pow(nodes)
}

/// Calls `visit` on every full strategy tree of depth `n`.
pub fn for_each_strategy_tree<V>(spec: &SourceSpec, n: usize, mut visit: V) -> Result<()>
where
    V: FnMut(&StrategyTree) -> Result<()>,
{
    let count = strategy_count(spec, n);
    if count.is_none_or(|c| c > STRATEGY_ENUM_GUARD) {
        let shown = count.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string());
        return Err(GsvError::EnumLimit { count: shown, guard: STRATEGY_ENUM_GUARD });
    }
    let faces = spec.num_faces();
    let nodes = internal_nodes(faces, n) as usize;
    let dice = spec.num_dice();
    fn build(digits: &[usize], next: &mut usize, faces: usize, depth: usize, n: usize) -> StrategyTree {
        let die = digits[*next];
        *next += 1;
        let children = if depth + 1 < n {
            (0..faces).map(|_| build(digits, next, faces, depth + 1, n)).collect()
        } else {
            Vec::new()
        };
        StrategyTree { die, children }
    }
    if nodes == 0 {
        return visit(&StrategyTree::leaf(0));
    }
    let mut digits = vec![0usize; nodes];
    loop {
        let tree = build(&digits, &mut 0, faces, 0, n);
        visit(&tree)?;
        let mut i = 0;
        while i < nodes {
            digits[i] += 1;
            if digits[i] < dice {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == nodes {
            return Ok(());
        }
    }
}

/// Worst-case TV distance over all strategy trees, with a maximizing tree.
pub fn exact_multibit_error<E: Extractor>(
    spec: &SourceSpec,
    table: &ExtractorTable<E>,
    m: usize,
) -> Result<(Rational, StrategyTree)> {
    output_bits(table, m)?;
    check_tree(spec, table.n)?;
    let mut best: Option<(Rational, StrategyTree)> = None;
    for_each_strategy_tree(spec, table.n, |tree| {
        let tv = tv_distance(&output_distribution(spec, tree, table)?, m)?;
        if best.as_ref().is_none_or(|(b, _)| tv > *b) {
            best = Some((tv, tree.clone()));
        }
        Ok(())
    })?;
    Ok(best.expect("at least one strategy"))
}

/// Exact TV distance under one fixed strategy.
pub fn multibit_error_under<E: Extractor>(
    spec: &SourceSpec,
    strategy: &dyn Strategy,
    table: &ExtractorTable<E>,
    m: usize,
) -> Result<Rational> {
    output_bits(table, m)?;
    tv_distance(&output_distribution(spec, strategy, table)?, m)
}

/// `Pr[Ext = +1]` under a fixed strategy.
pub fn advantage<E: Extractor>(spec: &SourceSpec, strategy: &dyn Strategy, table: &ExtractorTable<E>) -> Result<Rational> {
    require_bits(table)?;
    let dist = output_distribution(spec, strategy, table)?;
    Ok(dist.get(&Output::Bit(Sign::Plus)).cloned().unwrap_or_else(Rational::zero))
}

/// Smallest achievable `Pr[Ext = +1]` over all strategies.
pub fn min_advantage<E: Extractor>(spec: &SourceSpec, table: &ExtractorTable<E>) -> Result<Rational> {
    let report = exact_extremes(spec, table)?;
    Ok((report.min_expectation + int(1)) / int(2))
}

/// Greedy adversary pushing `Pr[Ext = +1]` up.
///
/// At each history, `α(f)` is the smallest achievable advantage after face
/// `f` and `α` the smallest at the node itself; the first die with
/// `E_d[α(F) − α] ≥ ε·Var_d[α(F)]` is played.
pub fn greedy_plus_strategy<E: Extractor>(
    spec: &SourceSpec,
    table: &ExtractorTable<E>,
    epsilon: &Rational,
) -> Result<StrategyTree> {
    require_bits(table)?;
    check_tree(spec, table.n)?;
    fn rec<E: Extractor>(
        spec: &SourceSpec,
        table: &ExtractorTable<E>,
        epsilon: &Rational,
        history: &mut Vec<usize>,
        state: &E::State,
    ) -> Result<(Rational, Option<StrategyTree>)> {
        if history.len() == table.n {
            let alpha = match table.ext.output(state) {
                Output::Bit(Sign::Plus) => Rational::one(),
                _ => Rational::zero(),
            };
            return Ok((alpha, None));
        }
        let mut alphas = Vec::with_capacity(spec.num_faces());
        let mut trees = Vec::new();
        for f in 0..spec.num_faces() {
            let mut next = state.clone();
            table.ext.absorb(&mut next, f);
            history.push(f);
            let (a, t) = rec(spec, table, epsilon, history, &next)?;
            history.pop();
            alphas.push(a);
            trees.extend(t);
        }
        let alpha = spec
            .dice
            .iter()
            .map(|d| dot(&d.probs, &alphas))
            .min()
            .expect("at least one die");
        let psi: Vec<Rational> = alphas.iter().map(|a| a - &alpha).collect();
        let die = spec
            .dice
            .iter()
            .position(|d| {
                let mean = dot(&d.probs, &psi);
                let second = d.probs.iter().zip(&psi).map(|(p, x)| p * x * x).sum::<Rational>();
                let var = second - &mean * &mean;
                mean >= epsilon * var
            })
            .ok_or_else(|| GsvError::NoQualifyingDie { history: history.clone() })?;
        Ok((alpha, Some(StrategyTree { die, children: trees })))
    }
    let (_, tree) = rec(spec, table, epsilon, &mut Vec::new(), &table.ext.start())?;
    Ok(tree.unwrap_or_else(|| StrategyTree::leaf(0)))
}

/// Writes `n,bias,bias_float` rows.
pub fn write_bias_csv<W: Write>(rows: &[(usize, Rational)], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| GsvError::Parameter(format!("csv output failed: {e}"));
    writer.write_record(["n", "bias", "bias_float"]).map_err(io)?;
    for (n, bias) in rows {
        writer
            .write_record([n.to_string(), rational::format(bias), format!("{:e}", rational::to_f64(bias))])
            .map_err(io)?;
    }
    writer.flush().map_err(|e| GsvError::Parameter(format!("csv output failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::extractors::{BitExp, ConstantPlus, MultiBitNaive, TableExtractor};
    use crate::model::ConstantDie;
    use crate::rational::frac;

    fn pm() -> TableExtractor {
        // face 0 -> +1, face 1 -> -1
        TableExtractor::from_mask(2, 1, 0b01)
    }

    #[test]
    fn constant_extractor_has_bias_one() {
        for n in 0..4 {
            let r = exact_extremes(&corpus::two_dice(), &ExtractorTable::new(ConstantPlus, n)).unwrap();
            assert_eq!((r.max_expectation, r.min_expectation, r.bias), (int(1), int(1), int(1)));
        }
    }

    #[test]
    fn sv_pair_one_sample() {
        let spec = corpus::sv_pair(&frac(1, 4));
        let r = exact_extremes(&spec, &ExtractorTable::new(pm(), 1)).unwrap();
        assert_eq!(r.max_expectation, frac(1, 2));
        assert_eq!(r.min_expectation, frac(-1, 2));
        assert_eq!(r.bias, frac(1, 2));
        assert_eq!(r.max_strategy, StrategyTree::leaf(0));
        assert_eq!(r.min_strategy, StrategyTree::leaf(1));
    }

    #[test]
    fn fair_coin_one_sample_is_unbiased() {
        let r = exact_extremes(&corpus::fair_coin(), &ExtractorTable::new(pm(), 1)).unwrap();
        assert_eq!((r.max_expectation, r.min_expectation, r.bias), (int(0), int(0), int(0)));
    }

    #[test]
    fn reported_strategies_reproduce_extremes() {
        let spec = corpus::two_dice();
        let ext = BitExp::new(&[int(1), int(-1), int(0)]).unwrap();
        let table = ExtractorTable::new(ext, 4);
        let r = exact_extremes(&spec, &table).unwrap();
        let hi = expectation(&output_distribution(&spec, &r.max_strategy, &table).unwrap()).unwrap();
        let lo = expectation(&output_distribution(&spec, &r.min_strategy, &table).unwrap()).unwrap();
        assert_eq!((hi, lo), (r.max_expectation, r.min_expectation));
    }

    #[test]
    fn distribution_examples() {
        let point = SourceSpec::from_dice(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let dist = output_distribution(&point, &ConstantDie(0), &ExtractorTable::new(pm(), 1)).unwrap();
        assert_eq!(dist.into_iter().collect::<Vec<_>>(), vec![(Output::Bit(Sign::Minus), int(1))]);

        let xor = TableExtractor::from_mask(2, 2, 0b1001);
        let dist = output_distribution(&corpus::fair_coin(), &ConstantDie(0), &ExtractorTable::new(xor, 2)).unwrap();
        assert_eq!(dist.values().cloned().collect::<Vec<_>>(), vec![frac(1, 2), frac(1, 2)]);

        let sv = corpus::sv_pair(&frac(1, 4));
        let dist = output_distribution(&sv, &ConstantDie(0), &ExtractorTable::new(pm(), 1)).unwrap();
        assert_eq!(dist[&Output::Bit(Sign::Plus)], frac(3, 4));
        assert_eq!(dist[&Output::Bit(Sign::Minus)], frac(1, 4));
    }

    #[test]
    fn bad_strategy_is_reported() {
        let err = output_distribution(&corpus::fair_coin(), &ConstantDie(3), &ExtractorTable::new(pm(), 1));
        assert_eq!(err.unwrap_err(), GsvError::Strategy { die: 3, dice: 1 });
    }

    #[test]
    fn tv_examples() {
        let identity = TableExtractor::from_mask(2, 1, 0b10);
        let (tv, _) = exact_multibit_error(&corpus::fair_coin(), &ExtractorTable::new(identity, 1), 1).unwrap();
        assert_eq!(tv, int(0));
        let (tv, _) = exact_multibit_error(&corpus::two_dice(), &ExtractorTable::new(ConstantPlus, 2), 1).unwrap();
        assert_eq!(tv, frac(1, 2));
    }

    #[test]
    fn e1_multibit_worst_case_dominates_constant_strategy() {
        let spec = corpus::e1();
        let ext = MultiBitNaive::new(&[int(-1), int(1), int(0), int(0)], 1).unwrap();
        let table = ExtractorTable::new(ext, 2);
        let (worst, tree) = exact_multibit_error(&spec, &table, 1).unwrap();
        let constant = multibit_error_under(&spec, &ConstantDie(0), &table, 1).unwrap();
        assert!(worst >= constant);
        assert_eq!(multibit_error_under(&spec, &tree, &table, 1).unwrap(), worst);
    }

    #[test]
    fn strategy_enumeration_counts() {
        let spec = corpus::two_dice();
        assert_eq!(internal_nodes(3, 2), 4);
        let mut seen = 0;
        for_each_strategy_tree(&spec, 2, |_| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 16);
        assert!(matches!(
            for_each_strategy_tree(&spec, 5, |_| Ok(())),
            Err(GsvError::EnumLimit { .. })
        ));
    }

    #[test]
    fn greedy_on_sv_pair_matches_hand_computation() {
        let spec = corpus::sv_pair(&frac(1, 4));
        let table = ExtractorTable::new(pm(), 1);
        let eps = frac(1, 2);
        let tree = greedy_plus_strategy(&spec, &table, &eps).unwrap();
        assert_eq!(tree, StrategyTree::leaf(0));
        let alpha0 = min_advantage(&spec, &table).unwrap();
        assert_eq!(alpha0, frac(1, 4));
        let gained = advantage(&spec, &tree, &table).unwrap();
        assert_eq!(gained, frac(3, 4));
        let bound = &alpha0 + &eps / (int(1) + &eps) * &alpha0 * (int(1) - &alpha0);
        assert_eq!(bound, frac(5, 16));
        assert!(gained >= bound);
    }

    #[test]
    fn greedy_fails_on_balanced_fair_coin() {
        let err = greedy_plus_strategy(&corpus::fair_coin(), &ExtractorTable::new(pm(), 1), &frac(1, 2));
        assert_eq!(err.unwrap_err(), GsvError::NoQualifyingDie { history: vec![] });
    }

    #[test]
    fn greedy_on_constant_extractor_has_full_advantage() {
        let spec = corpus::sv_pair(&frac(1, 4));
        let table = ExtractorTable::new(ConstantPlus, 2);
        let tree = greedy_plus_strategy(&spec, &table, &frac(1, 3)).unwrap();
        assert_eq!(advantage(&spec, &tree, &table).unwrap(), int(1));
    }

    #[test]
    fn bias_csv_layout() {
        let mut buf = Vec::new();
        write_bias_csv(&[(1, frac(1, 2)), (2, int(0))], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("n,bias,bias_float"));
        assert!(text.contains("1,1/2,5e-1"));
    }

    #[test]
    fn multibit_output_kind_is_checked() {
        let table = ExtractorTable::new(MultiBitNaive::new(&[int(1), int(-1)], 2).unwrap(), 1);
        assert!(exact_extremes(&corpus::fair_coin(), &table).is_err());
        assert!(exact_multibit_error(&corpus::fair_coin(), &table, 3).is_err());
    }
}
