//! Multi-bit extractor over grouped martingales.
//!
//! Martingales that have never been the largest only ever move by the
//! factors `1 ± ψ/2`, so martingales sharing a value can be stored as one
//! counted group. Those that have been largest are kept individually. The
//! state is a rank-ordered sequence of runs: a run is either a counted group
//! (`L`) or a single promoted martingale (`LL`), and runs tile the ranks
//! `0..2^m` in order.
//!
//! After every step the largest martingale is promoted into `LL` if it still
//! sits in a group; ties go to the highest rank from the previous step. To
//! recover the output coordinate, each step logs which runs of the previous
//! step (and which rank parity within them) each new run came from; the
//! top rank is walked back through the log to rank order at step 0, which is
//! coordinate order.
//!
//! Produces the same outputs as [`super::MultiBitNaive`] for every input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{checked_psi, Extractor, Output, OutputKind, FAST_M_LIMIT};
use crate::error::{GsvError, Result};
use crate::rational::Rational;

const NORMALIZE_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Run {
    numer: BigInt,
    count: u64,
    /// Index into the promoted list for single promoted martingales.
    promoted: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    All,
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Piece {
    src: usize,
    parity: Parity,
    count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RunOrigin {
    start: u64,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum StepLog {
    Identity,
    Update { prev_starts: Vec<u64>, runs: Vec<RunOrigin> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiBitListsState {
    runs: Vec<Run>,
    denom: BigInt,
    first_largest: Vec<usize>,
    m: usize,
    steps: usize,
    log: Vec<StepLog>,
}

fn evens_in(lo: u64, hi: u64) -> u64 {
    // even integers in [lo, hi], lo >= 1
    hi / 2 - (lo - 1) / 2
}

impl MultiBitListsState {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > FAST_M_LIMIT {
            return Err(GsvError::MLimit { m, limit: FAST_M_LIMIT });
        }
        let size = 1u64 << m;
        let mut state = MultiBitListsState {
            runs: vec![Run { numer: BigInt::one(), count: size, promoted: None }],
            denom: BigInt::from(size),
            first_largest: Vec::new(),
            m,
            steps: 0,
            log: Vec::new(),
        };
        state.promote_top();
        Ok(state)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn promote_top(&mut self) {
        let last = self.runs.last_mut().expect("runs tile all ranks");
        if last.promoted.is_some() {
            return;
        }
        let id = self.first_largest.len();
        self.first_largest.push(self.steps);
        if last.count == 1 {
            last.promoted = Some(id);
        } else {
            last.count -= 1;
            let numer = last.numer.clone();
            self.runs.push(Run { numer, count: 1, promoted: Some(id) });
        }
    }

    pub fn step(&mut self, psi_value: &Rational) {
        self.steps += 1;
        if psi_value.is_zero() {
            self.log.push(StepLog::Identity);
            return;
        }
        let p = psi_value.numer().clone();
        let two_q = psi_value.denom() * 2;
        let up = &two_q + &p;
        let down = &two_q - &p;

        let old = std::mem::take(&mut self.runs);
        let top_index = old.len() - 1;
        let mut prev_starts = Vec::with_capacity(old.len());
        let mut signed_sum = BigInt::zero();
        let mut pieces: Vec<(BigInt, Option<usize>, Piece)> = Vec::with_capacity(2 * old.len());
        let mut start = 0u64;
        for (i, run) in old.iter().enumerate() {
            prev_starts.push(start);
            if i == top_index {
                break;
            }
            let (lo, hi) = (start + 1, start + run.count);
            let evens = evens_in(lo, hi);
            let odds = run.count - evens;
            match evens.cmp(&odds) {
                std::cmp::Ordering::Greater => signed_sum += &run.numer,
                std::cmp::Ordering::Less => signed_sum -= &run.numer,
                std::cmp::Ordering::Equal => {}
            }
            let single = run.promoted.is_some();
            if evens > 0 {
                let parity = if single { Parity::All } else { Parity::Even };
                pieces.push((&run.numer * &up, run.promoted, Piece { src: i, parity, count: evens }));
            }
            if odds > 0 {
                let parity = if single { Parity::All } else { Parity::Odd };
                pieces.push((&run.numer * &down, run.promoted, Piece { src: i, parity, count: odds }));
            }
            start = hi;
        }
        let top = &old[top_index];
        debug_assert!(top.promoted.is_some() && top.count == 1);
        let top_numer = &top.numer * &two_q - &p * &signed_sum;
        pieces.push((top_numer, top.promoted, Piece { src: top_index, parity: Parity::All, count: 1 }));

        pieces.sort_by(|a, b| a.0.cmp(&b.0));

        let mut runs: Vec<Run> = Vec::with_capacity(pieces.len());
        let mut origins: Vec<RunOrigin> = Vec::with_capacity(pieces.len());
        let mut start = 0u64;
        for (numer, promoted, piece) in pieces {
            let merge = promoted.is_none()
                && runs.last().is_some_and(|r: &Run| r.promoted.is_none() && r.numer == numer);
            let count = piece.count;
            if merge {
                runs.last_mut().unwrap().count += count;
                origins.last_mut().unwrap().pieces.push(piece);
            } else {
                runs.push(Run { numer, count, promoted });
                origins.push(RunOrigin { start, pieces: vec![piece] });
            }
            start += count;
        }
        self.runs = runs;
        self.denom *= &two_q;
        self.log.push(StepLog::Update { prev_starts, runs: origins });
        self.promote_top();
        if self.steps.is_multiple_of(NORMALIZE_EVERY) {
            self.normalize();
        }
    }

    fn normalize(&mut self) {
        let g = self.runs.iter().fold(self.denom.clone(), |g, r| g.gcd(&r.numer));
        if g > BigInt::one() {
            for r in self.runs.iter_mut() {
                r.numer = &r.numer / &g;
            }
            self.denom = &self.denom / &g;
        }
    }

    /// Coordinate of the largest martingale (ties to the highest rank).
    pub fn output_index(&self) -> u64 {
        let mut rank = (1u64 << self.m) - 1;
        for entry in self.log.iter().rev() {
            let StepLog::Update { prev_starts, runs } = entry else {
                continue;
            };
            let k = runs.partition_point(|r| r.start <= rank) - 1;
            let mut offset = rank - runs[k].start;
            for piece in &runs[k].pieces {
                if offset < piece.count {
                    let s = prev_starts[piece.src];
                    rank = match piece.parity {
                        Parity::All => s + offset,
                        Parity::Even => {
                            let first = if (s + 1) % 2 == 0 { s + 1 } else { s + 2 };
                            first + 2 * offset - 1
                        }
                        Parity::Odd => {
                            let first = if (s + 1) % 2 == 1 { s + 1 } else { s + 2 };
                            first + 2 * offset - 1
                        }
                    };
                    break;
                }
                offset -= piece.count;
            }
        }
        rank
    }

    fn value(&self, numer: &BigInt) -> Rational {
        Rational::new(numer.clone(), self.denom.clone())
    }

    /// Never-largest martingales grouped by value, ascending: `(value, count)`.
    pub fn groups(&self) -> Vec<(Rational, u64)> {
        let mut out: Vec<(Rational, u64)> = Vec::new();
        for r in self.runs.iter().filter(|r| r.promoted.is_none()) {
            let v = self.value(&r.numer);
            match out.last_mut() {
                Some((last, c)) if *last == v => *c += r.count,
                _ => out.push((v, r.count)),
            }
        }
        out
    }

    /// Promoted martingales `(value, step at which it first became largest)`,
    /// in promotion order.
    pub fn promoted(&self) -> Vec<(Rational, usize)> {
        let mut out = vec![(Rational::zero(), 0); self.first_largest.len()];
        for r in &self.runs {
            if let Some(id) = r.promoted {
                out[id] = (self.value(&r.numer), self.first_largest[id]);
            }
        }
        out
    }

    /// Number of stored runs (groups plus promoted singles).
    pub fn stored_runs(&self) -> usize {
        self.runs.len()
    }

    /// Exact check: all values positive, counts tile `2^m`, mass sums to 1.
    pub fn is_distribution(&self) -> bool {
        let total: u64 = self.runs.iter().map(|r| r.count).sum();
        let mass: BigInt = self.runs.iter().map(|r| &r.numer * BigInt::from(r.count)).sum();
        total == 1u64 << self.m
            && self.runs.iter().all(|r| r.numer.is_positive())
            && mass == self.denom
            && self.runs.windows(2).all(|w| w[0].numer <= w[1].numer)
    }
}

pub fn multibit_extract_fast(psi: &[Rational], faces: &[usize], m: usize) -> Result<String> {
    Ok(MultiBitFast::new(psi, m)?.extract(faces).bits(m))
}

#[derive(Debug, Clone)]
pub struct MultiBitFast {
    psi: Vec<Rational>,
    m: usize,
}

impl MultiBitFast {
    pub fn new(psi: &[Rational], m: usize) -> Result<Self> {
        MultiBitListsState::new(m)?;
        Ok(MultiBitFast { psi: checked_psi(psi)?, m })
    }
}

impl Extractor for MultiBitFast {
    type State = MultiBitListsState;

    fn start(&self) -> MultiBitListsState {
        MultiBitListsState::new(self.m).expect("m validated")
    }
    fn absorb(&self, state: &mut MultiBitListsState, face: usize) {
        state.step(&self.psi[face]);
    }
    fn output(&self, state: &MultiBitListsState) -> Output {
        Output::Index(state.output_index())
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Index { m: self.m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractors::multibit_naive::MultiBitState;
    use crate::rational::{frac, int};

    #[test]
    fn empty_sequence_ties_to_last_index() {
        assert_eq!(multibit_extract_fast(&[int(1), int(-1)], &[], 5).unwrap(), "11111");
        assert_eq!(multibit_extract_fast(&[int(1), int(-1)], &[], 62).unwrap().len(), 62);
    }

    #[test]
    fn rejects_bad_m() {
        assert!(MultiBitListsState::new(0).is_err());
        assert!(MultiBitListsState::new(63).is_err());
    }

    #[test]
    fn initial_lists() {
        let s = MultiBitListsState::new(3).unwrap();
        assert_eq!(s.groups(), vec![(frac(1, 8), 7)]);
        assert_eq!(s.promoted(), vec![(frac(1, 8), 0)]);
    }

    #[test]
    fn values_match_naive_coordinates() {
        let values = [int(1), frac(-1, 2), frac(1, 3), int(-1), int(0), frac(3, 4), int(1), frac(-2, 3)];
        for m in 1..=4 {
            let mut fast = MultiBitListsState::new(m).unwrap();
            let mut naive = MultiBitState::new(m).unwrap();
            for v in &values {
                fast.step(v);
                naive.step(v);
                assert!(fast.is_distribution());
                let mut from_naive: Vec<Rational> = naive.z();
                from_naive.sort();
                let mut from_fast: Vec<Rational> = Vec::new();
                for (value, count) in fast.groups() {
                    from_fast.extend(std::iter::repeat_n(value, count as usize));
                }
                from_fast.extend(fast.promoted().into_iter().map(|(v, _)| v));
                from_fast.sort();
                assert_eq!(from_fast, from_naive);
                assert_eq!(fast.output_index() as usize, naive.top());
            }
        }
    }

    #[test]
    fn promoted_list_grows_at_most_one_per_step() {
        let mut s = MultiBitListsState::new(6).unwrap();
        for t in 0..40 {
            s.step(&frac(if t % 3 == 0 { 1 } else { -1 }, 1));
            assert!(s.promoted().len() <= s.steps() + 1);
        }
    }
}
