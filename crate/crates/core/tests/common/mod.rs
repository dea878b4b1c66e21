#![allow(dead_code)]

use gsv_core::model::SourceSpec;
use gsv_core::rational::Rational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn r(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn ri(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

pub fn mean(probs: &[Rational], psi: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (p, x) in probs.iter().zip(psi) {
        total += p * x;
    }
    total
}

pub fn var(probs: &[Rational], psi: &[Rational]) -> Rational {
    let mu = mean(probs, psi);
    let mut total = Rational::zero();
    for (p, x) in probs.iter().zip(psi) {
        let dev = x - &mu;
        total += p * &dev * &dev;
    }
    total
}

/// Rank by plain fraction Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pivot;
                let pivot_row = m[rank].clone();
                for (cell, p) in m[i].iter_mut().zip(&pivot_row).skip(c) {
                    *cell -= &factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn normalized(weights: &[i64]) -> Vec<Rational> {
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| r(w, total)).collect()
}

/// Random valid source: each die gets a random support of size
/// `min_support..=faces` with integer weights 1..=4; uncovered faces are
/// added to the last die.
pub fn random_spec(rng: &mut ChaCha8Rng, faces: usize, dice: usize, min_support: usize) -> SourceSpec {
    let mut weights = vec![vec![0i64; faces]; dice];
    let mut covered = vec![false; faces];
    let all: Vec<usize> = (0..faces).collect();
    for w in weights.iter_mut() {
        let size = rng.gen_range(min_support.min(faces)..=faces);
        for &f in all.choose_multiple(rng, size) {
            w[f] = rng.gen_range(1..=4);
            covered[f] = true;
        }
    }
    for (f, c) in covered.iter().enumerate() {
        if !c {
            weights[dice - 1][f] = rng.gen_range(1..=4);
        }
    }
    SourceSpec::from_dice(weights.iter().map(|w| normalized(w)).collect()).expect("valid by construction")
}

/// Random source satisfying NK+ together with the function certifying it:
/// every die mixes two-face distributions balancing a positive and a
/// negative value of `psi`.
pub fn random_nk_plus_spec(rng: &mut ChaCha8Rng) -> (SourceSpec, Vec<Rational>) {
    let faces = rng.gen_range(2..=5);
    let dice = rng.gen_range(1..=4);
    let mut psi: Vec<i64> = (0..faces).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=3) } else { -rng.gen_range(1..=3) }).collect();
    if psi.iter().all(|&x| x > 0) {
        psi[0] = -psi[0];
    }
    if psi.iter().all(|&x| x < 0) {
        psi[0] = -psi[0];
    }
    let pos: Vec<usize> = (0..faces).filter(|&f| psi[f] > 0).collect();
    let neg: Vec<usize> = (0..faces).filter(|&f| psi[f] < 0).collect();
    let pairs: Vec<(usize, usize)> = pos.iter().flat_map(|&a| neg.iter().map(move |&b| (a, b))).collect();
    let mut out = Vec::with_capacity(dice);
    for d in 0..dice {
        let chosen: Vec<(usize, usize)> = if d + 1 == dice {
            pairs.clone()
        } else {
            let k = rng.gen_range(1..=pairs.len());
            pairs.choose_multiple(rng, k).copied().collect()
        };
        let mut probs = vec![Rational::zero(); faces];
        let weights: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=3)).collect();
        let total: i64 = weights.iter().sum();
        for (&(a, b), &w) in chosen.iter().zip(&weights) {
            // p psi(a) + (1 - p) psi(b) = 0
            let p = r(-psi[b], psi[a] - psi[b]);
            let share = r(w, total);
            probs[a] += &share * &p;
            probs[b] += &share * (Rational::one() - &p);
        }
        out.push(probs);
    }
    let psi = psi.into_iter().map(ri).collect();
    (SourceSpec::from_dice(out).expect("valid by construction"), psi)
}

/// Random source on which NK+ fails: either a generic random source (no
/// kernel), or an NK+ source plus a die on which every function in the
/// kernel is constant.
pub fn random_nk_plus_failing(rng: &mut ChaCha8Rng) -> SourceSpec {
    if rng.gen_bool(0.5) {
        let faces = rng.gen_range(2..=5);
        let dice = rng.gen_range(1..=4);
        return random_spec(rng, faces, dice, 1);
    }
    loop {
        let (spec, _) = random_nk_plus_spec(rng);
        if spec.num_dice() >= 4 {
            continue;
        }
        let mut dice: Vec<Vec<Rational>> = spec.dice.iter().map(|d| d.probs.clone()).collect();
        let f = rng.gen_range(0..spec.num_faces());
        let mut point = vec![Rational::zero(); spec.num_faces()];
        point[f] = Rational::one();
        dice.push(point);
        return SourceSpec::from_dice(dice).expect("valid by construction");
    }
}

pub fn in_unit_range(values: &[Rational]) -> bool {
    values.iter().all(|v| v.abs() <= Rational::one())
}
