//! Exact decision procedures for the kernel conditions and the trichotomy
//! they induce, with witnesses and certificates that can be re-checked
//! independently.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{GsvError, Result};
use crate::linalg;
use crate::model::{die_mean, die_var, min_variance, normalize, support, SourceSpec, Witness, WitnessKind};
use crate::rational::{self, int, Rational};

/// Subset enumeration in [`check_hnk`] refuses sources with more dice.
pub const HNK_DICE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelBasis {
    #[serde(serialize_with = "ser_vectors")]
    pub basis: Vec<Vec<Rational>>,
}

fn ser_vectors<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        seq.serialize_element(&row.iter().map(rational::format).collect::<Vec<_>>())?;
    }
    seq.end()
}

fn pmf_rows(spec: &SourceSpec) -> Vec<Vec<Rational>> {
    spec.dice.iter().map(|d| d.probs.clone()).collect()
}

/// Basis of the functions with zero mean under every die; each vector is
/// scaled to `max |v| = 1` with a positive leading entry.
pub fn kernel_basis(spec: &SourceSpec) -> KernelBasis {
    let basis = linalg::nullspace(&pmf_rows(spec), spec.num_faces())
        .iter()
        .map(|v| normalize(v))
        .collect();
    KernelBasis { basis }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

pub fn check_nk(spec: &SourceSpec) -> ConditionResult {
    let basis = kernel_basis(spec);
    let witness = basis.basis.into_iter().next().map(|v| Witness {
        values: v,
        kind: WitnessKind::Nk,
        epsilon: None,
        min_variance: None,
    });
    ConditionResult { holds: witness.is_some(), witness }
}

pub fn is_constant_on(values: &[Rational], faces: impl IntoIterator<Item = usize>) -> bool {
    let mut it = faces.into_iter();
    match it.next() {
        None => true,
        Some(first) => it.all(|f| values[f] == values[first]),
    }
}

fn combination(vectors: &[Vec<Rational>], coeffs: &[usize], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (v, &c) in vectors.iter().zip(coeffs) {
        let c = int(c as i64);
        for (o, x) in out.iter_mut().zip(v) {
            *o += &c * x;
        }
    }
    out
}

/// Searches coefficient tuples in `{1, ..., supports.len() + 1}^k`
/// (lexicographic order) for an integer combination of `vectors` that is
/// non-constant on every given support. Such a tuple exists whenever each
/// support has some vector non-constant on it.
fn nonconstant_combination(vectors: &[Vec<Rational>], supports: &[Vec<usize>], len: usize) -> Option<Vec<Rational>> {
    if vectors.is_empty() {
        return None;
    }
    let top = supports.len() + 1;
    let mut coeffs = vec![1usize; vectors.len()];
    loop {
        let psi = combination(vectors, &coeffs, len);
        if supports.iter().all(|s| !is_constant_on(&psi, s.iter().copied())) {
            return Some(psi);
        }
        let mut i = coeffs.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if coeffs[i] < top {
                coeffs[i] += 1;
                break;
            }
            coeffs[i] = 1;
        }
    }
}

pub fn check_nk_plus(spec: &SourceSpec) -> ConditionResult {
    let basis = kernel_basis(spec).basis;
    let supports: Vec<Vec<usize>> = spec.dice.iter().map(|d| support(d).into_iter().collect()).collect();
    let mut per_die = Vec::with_capacity(spec.num_dice());
    for s in &supports {
        match basis.iter().find(|v| !is_constant_on(v, s.iter().copied())) {
            Some(v) => per_die.push(v.clone()),
            None => return ConditionResult { holds: false, witness: None },
        }
    }
    let psi = nonconstant_combination(&per_die, &supports, spec.num_faces())
        .expect("a non-constant combination exists for coefficient sets larger than the dice count");
    let values = normalize(&psi);
    let witness = Witness {
        min_variance: Some(min_variance(spec, &values).expect("arity matches")),
        values,
        kind: WitnessKind::NkPlus,
        epsilon: None,
    };
    ConditionResult { holds: true, witness: Some(witness) }
}

/// A die subset whose restricted kernel is trivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HnkCertificate {
    pub dice: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HnkResult {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<HnkCertificate>,
}

fn restricted_kernel_is_trivial(spec: &SourceSpec, dice: &[usize]) -> (bool, Vec<usize>) {
    let faces = spec.support_of(dice);
    let sub = spec.restrict(dice, &faces);
    let rank = linalg::rank(&pmf_rows(&sub), faces.len());
    (rank == faces.len(), faces)
}

/// Visits nonempty subsets of `0..n` by size, then lexicographically;
/// stops at the first subset for which `visit` returns `true`.
fn first_subset(n: usize, mut visit: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    for k in 1..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if visit(&idx) {
                return Some(idx);
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

pub fn check_hnk(spec: &SourceSpec) -> Result<HnkResult> {
    if spec.num_dice() > HNK_DICE_LIMIT {
        return Err(GsvError::SubsetLimit { dice: spec.num_dice(), limit: HNK_DICE_LIMIT });
    }
    let failing = first_subset(spec.num_dice(), |dice| restricted_kernel_is_trivial(spec, dice).0);
    Ok(match failing {
        None => HnkResult { holds: true, certificate: None },
        Some(dice) => {
            let faces = spec.support_of(&dice);
            HnkResult { holds: false, certificate: Some(HnkCertificate { dice, faces }) }
        }
    })
}

pub fn check_mvr(spec: &SourceSpec, psi: &[Rational], epsilon: &Rational) -> Result<bool> {
    for d in &spec.dice {
        if die_mean(d, psi)?.abs() >= epsilon * die_var(d, psi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn check_mvd(spec: &SourceSpec, psi: &[Rational], epsilon: &Rational, delta: &Rational) -> Result<bool> {
    for d in &spec.dice {
        if die_mean(d, psi)?.abs() >= epsilon * (die_var(d, psi)? - delta) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exponent `3 * 2^|D| - 3` of the variance floor guaranteed by the
/// recursive MVR construction.
pub fn variance_floor_exponent(dice: usize) -> u64 {
    3 * (1u64 << dice.min(62)) - 3
}

/// Kernel vector of the sub-source `(faces, dice)` with positive variance
/// under as many dice as possible, lifted back to the full face set.
fn generic_kernel_vector(spec: &SourceSpec, dice: &[usize], faces: &[usize]) -> Option<Vec<Rational>> {
    let sub = spec.restrict(dice, faces);
    let basis = linalg::nullspace(&pmf_rows(&sub), faces.len());
    if basis.is_empty() {
        return None;
    }
    let supports: Vec<Vec<usize>> = sub
        .dice
        .iter()
        .map(|d| support(d).into_iter().collect::<Vec<_>>())
        .filter(|s| basis.iter().any(|v| !is_constant_on(v, s.iter().copied())))
        .collect();
    let local = if supports.is_empty() {
        basis[0].clone()
    } else {
        nonconstant_combination(&basis, &supports, faces.len())?
    };
    let local = normalize(&local);
    let mut full = vec![Rational::zero(); spec.num_faces()];
    for (&f, v) in faces.iter().zip(local) {
        full[f] = v;
    }
    Some(full)
}

fn mvr_construct(spec: &SourceSpec, dice: &[usize], faces: &[usize], epsilon: &Rational) -> Result<Vec<Rational>> {
    let psi = generic_kernel_vector(spec, dice, faces).ok_or(GsvError::NotHnk)?;
    let mut flat = Vec::new();
    let mut v: Option<Rational> = None;
    for &d in dice {
        let var = die_var(&spec.dice[d], &psi)?;
        if var.is_zero() {
            flat.push(d);
        } else if v.as_ref().is_none_or(|m| var < *m) {
            v = Some(var);
        }
    }
    if flat.is_empty() {
        return Ok(psi);
    }
    let v = v.ok_or(GsvError::NotHnk)?;
    let flat_faces = spec.support_of(&flat);
    let inner_eps = &v * epsilon * epsilon / int(8);
    let inner = mvr_construct(spec, &flat, &flat_faces, &inner_eps)?;
    let weight = &v * epsilon / int(8);
    Ok(psi.iter().zip(&inner).map(|(a, b)| a + &weight * b).collect())
}

/// Witness for `MVR(epsilon)` with variance floor `epsilon^(3 * 2^|D| - 3)`,
/// built recursively from the hereditary kernel witnesses and verified
/// exactly before it is returned.
pub fn mvr_witness(spec: &SourceSpec, epsilon: &Rational) -> Result<Witness> {
    if !epsilon.is_positive() {
        return Err(GsvError::Parameter("epsilon must be positive".into()));
    }
    if !check_hnk(spec)?.holds {
        return Err(GsvError::NotHnk);
    }
    let all: Vec<usize> = (0..spec.num_dice()).collect();
    let faces: Vec<usize> = (0..spec.num_faces()).collect();
    let phi = mvr_construct(spec, &all, &faces, epsilon)?;
    let too_large = || GsvError::EpsilonTooLarge { epsilon: rational::format(epsilon) };
    if !check_mvr(spec, &phi, epsilon)? {
        return Err(too_large());
    }
    let v = min_variance(spec, &phi)?;
    if !meets_variance_floor(&v, epsilon, variance_floor_exponent(spec.num_dice()))? {
        return Err(too_large());
    }
    Ok(Witness { values: phi, kind: WitnessKind::Mvr, epsilon: Some(epsilon.clone()), min_variance: Some(v) })
}

/// `value >= epsilon^exponent`, evaluated exactly. For `epsilon <= 1` a
/// smaller exponent gives a larger power, so huge exponents are checked
/// through a capped one first.
pub fn meets_variance_floor(value: &Rational, epsilon: &Rational, exponent: u64) -> Result<bool> {
    const CAP: u64 = 512;
    if *epsilon <= Rational::one() && exponent > CAP && *value >= rational::pow(epsilon, CAP as u32) {
        return Ok(true);
    }
    if exponent > 1 << 16 {
        return Err(GsvError::Parameter(format!("variance floor exponent {exponent} is too large to evaluate")));
    }
    Ok(*value >= rational::pow(epsilon, exponent as u32))
}

/// Dual certificate for a source failing NK+: a die `d` whose supported
/// faces are tied to the die expectations by `psi(f_star) - psi(f_low) =
/// sum_d' beta(d') E_d'[psi]` for every face function `psi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualCertificate {
    pub die: usize,
    pub f_star: usize,
    pub f_low: usize,
    #[serde(with = "rational::serde_vec")]
    pub beta: Vec<Rational>,
    /// `max (sum |beta|)^2` over the face pairs in the die's support.
    #[serde(with = "rational::serde_one")]
    pub constant: Rational,
}

/// Coefficients `beta` expressing `indicator(f_star) - indicator(f_low)` as a
/// combination of the dice pmfs, if one exists.
pub fn dual_beta(spec: &SourceSpec, f_star: usize, f_low: usize) -> Option<Vec<Rational>> {
    if f_star == f_low {
        return Some(vec![Rational::zero(); spec.num_dice()]);
    }
    let rows: Vec<Vec<Rational>> = (0..spec.num_faces())
        .map(|f| spec.dice.iter().map(|d| d.probs[f].clone()).collect())
        .collect();
    let rhs: Vec<Rational> = (0..spec.num_faces())
        .map(|f| match f {
            _ if f == f_star => int(1),
            _ if f == f_low => int(-1),
            _ => Rational::zero(),
        })
        .collect();
    linalg::solve(&rows, &rhs, spec.num_dice())
}

pub fn dual_certificate(spec: &SourceSpec) -> Option<DualCertificate> {
    if check_nk_plus(spec).holds {
        return None;
    }
    let basis = kernel_basis(spec).basis;
    let die = spec
        .dice
        .iter()
        .position(|d| basis.iter().all(|v| is_constant_on(v, support(d))))?;
    let faces: Vec<usize> = support(&spec.dice[die]).into_iter().collect();
    let mut best: Option<(usize, usize, Vec<Rational>, Rational)> = None;
    for (i, &a) in faces.iter().enumerate() {
        for &b in &faces[i + 1..] {
            let beta = dual_beta(spec, a, b).expect("indicator differences on the die support lie in the pmf span");
            let mass: Rational = beta.iter().map(|x| x.abs()).sum();
            if best.as_ref().is_none_or(|(_, _, _, m)| mass > *m) {
                best = Some((a, b, beta, mass));
            }
        }
    }
    let (f_star, f_low, beta, mass) = best.unwrap_or_else(|| (faces[0], faces[0], vec![Rational::zero(); spec.num_dice()], Rational::zero()));
    Some(DualCertificate { die, f_star, f_low, beta, constant: &mass * &mass })
}

/// Exhaustive search of the grid `{-1 + 2k/steps}^F` for an MVR witness.
pub fn mvr_grid_search(spec: &SourceSpec, epsilon: &Rational, steps: usize) -> Result<Option<Vec<Rational>>> {
    let steps = steps.max(1);
    let grid: Vec<Rational> = (0..=steps).map(|k| rational::frac(2 * k as i64 - steps as i64, steps as i64)).collect();
    let faces = spec.num_faces();
    let mut idx = vec![0usize; faces];
    loop {
        let psi: Vec<Rational> = idx.iter().map(|&i| grid[i].clone()).collect();
        if check_mvr(spec, &psi, epsilon)? {
            return Ok(Some(psi));
        }
        let mut i = faces;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if idx[i] < steps {
                idx[i] += 1;
                break;
            }
            idx[i] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    NonExtractable,
    PolyError,
    ExpError,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::NonExtractable => "NON_EXTRACTABLE",
            Category::PolyError => "POLY_ERROR",
            Category::ExpError => "EXP_ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub nk: ConditionResult,
    pub nk_plus: ConditionResult,
    pub hnk: HnkResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_certificate: Option<DualCertificate>,
    pub category: Category,
}

pub fn classify(spec: &SourceSpec) -> Result<ClassificationReport> {
    let nk = check_nk(spec);
    let nk_plus = check_nk_plus(spec);
    let hnk = check_hnk(spec)?;
    let category = if nk_plus.holds {
        Category::ExpError
    } else if hnk.holds {
        Category::PolyError
    } else {
        Category::NonExtractable
    };
    let dual_certificate = if nk_plus.holds { None } else { dual_certificate(spec) };
    Ok(ClassificationReport { nk, nk_plus, hnk, dual_certificate, category })
}
