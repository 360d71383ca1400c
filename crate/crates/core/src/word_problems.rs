//! PARITY and MOD₃ as word problems over `C/P ≅ S₃`, decided by learning
//! two stabilizers of `(I ⊗ ∏C)|Φ⟩` through a `CliffP(Q)_L` oracle.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{state_of, weight2_stabilizers};
use crate::error::{Error, Result};
use crate::group::{Clifford1, SignedPauli2};
use crate::oracle::PcliffOracle;
use crate::tomography::learn_stabilizer_pair;

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidInput(format!("bit strings use 0 and 1, got {c:?}"))),
        })
        .collect()
}

fn encode_with(bits: &[bool], g: Clifford1) -> Result<Vec<Clifford1>> {
    if bits.is_empty() {
        return Err(Error::InvalidInput("empty bit string".into()));
    }
    Ok(bits
        .iter()
        .map(|&b| if b { g } else { Clifford1::identity() })
        .collect())
}

/// `C_i = H^{x_i}`.
pub fn encode_parity(bits: &[bool]) -> Result<Vec<Clifford1>> {
    encode_with(bits, Clifford1::hadamard())
}

/// `SH`, of order 3 in `C/P`.
pub fn sh() -> Clifford1 {
    Clifford1::phase_s().compose(Clifford1::hadamard())
}

/// `C_i = (SH)^{x_i}`.
pub fn encode_mod3(bits: &[bool]) -> Result<Vec<Clifford1>> {
    encode_with(bits, sh())
}

pub fn stabilizer_set(c: Clifford1) -> BTreeSet<SignedPauli2> {
    weight2_stabilizers(&state_of(c)).into_iter().collect()
}

fn matching(pair: &[SignedPauli2; 2], sets: &[BTreeSet<SignedPauli2>]) -> Vec<usize> {
    sets.iter()
        .enumerate()
        .filter(|(_, s)| pair.iter().all(|p| s.contains(p)))
        .map(|(i, _)| i)
        .collect()
}

fn check_pair(s1: SignedPauli2, s2: SignedPauli2) -> Result<[SignedPauli2; 2]> {
    let (a, b) = (s1.unsigned_part(), s2.unsigned_part());
    if a == b || a.weight() != 2 || b.weight() != 2 {
        return Err(Error::InvalidInput(format!(
            "need two distinct weight-2 operators, got {s1}, {s2}"
        )));
    }
    Ok([a, b])
}

/// `0` if both lie in `{XX, YY, ZZ}`, `1` if both lie in `{XZ, ZX, YY}`.
pub fn decide_parity(s1: SignedPauli2, s2: SignedPauli2) -> Result<u8> {
    let pair = check_pair(s1, s2)?;
    let sets = [
        stabilizer_set(Clifford1::identity()),
        stabilizer_set(Clifford1::hadamard()),
    ];
    match matching(&pair, &sets)[..] {
        [t] => Ok(t as u8),
        _ => Err(Error::InvalidInput(format!("{s1}, {s2} fit neither parity class"))),
    }
}

/// Stabilizer sets of `(I ⊗ (SH)^t)|Φ⟩` for `t = 0, 1, 2`.
pub fn mod3_reference_sets() -> [BTreeSet<SignedPauli2>; 3] {
    [0, 1, 2].map(|t| stabilizer_set(sh().pow(t)))
}

pub fn decide_mod3(s1: SignedPauli2, s2: SignedPauli2) -> Result<u8> {
    let pair = check_pair(s1, s2)?;
    match matching(&pair, &mod3_reference_sets())[..] {
        [t] => Ok(t as u8),
        _ => Err(Error::InvalidInput(format!("{s1}, {s2} fit no residue class"))),
    }
}

pub fn solve_parity<R: Rng + ?Sized>(
    oracle: &dyn PcliffOracle,
    bits: &[bool],
    budget: usize,
    rng: &mut R,
) -> Result<u8> {
    let learned = learn_stabilizer_pair(oracle, &encode_parity(bits)?, budget, rng)?;
    decide_parity(learned.pair[0], learned.pair[1])
}

pub fn solve_mod3<R: Rng + ?Sized>(oracle: &dyn PcliffOracle, bits: &[bool], budget: usize, rng: &mut R) -> Result<u8> {
    let learned = learn_stabilizer_pair(oracle, &encode_mod3(bits)?, budget, rng)?;
    decide_mod3(learned.pair[0], learned.pair[1])
}

/// Promise: the sequence multiplies to the identity coset or to `target`'s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordProblemInstance {
    pub target: Clifford1,
    pub sequence: Vec<Clifford1>,
}

impl WordProblemInstance {
    pub fn new(target: Clifford1, sequence: Vec<Clifford1>) -> Result<Self> {
        if target.is_pauli() {
            return Err(Error::InvalidInput(format!(
                "target {target} lies in the identity coset"
            )));
        }
        if sequence.is_empty() {
            return Err(Error::InvalidInput("empty word".into()));
        }
        Ok(WordProblemInstance { target, sequence })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordAnswer {
    Identity,
    Target,
}

pub fn solve_word_problem<R: Rng + ?Sized>(
    oracle: &dyn PcliffOracle,
    wp: &WordProblemInstance,
    budget: usize,
    rng: &mut R,
) -> Result<WordAnswer> {
    let learned = learn_stabilizer_pair(oracle, &wp.sequence, budget, rng)?;
    let sets = [stabilizer_set(Clifford1::identity()), stabilizer_set(wp.target)];
    match matching(&learned.pair, &sets)[..] {
        [0] => Ok(WordAnswer::Identity),
        [1] => Ok(WordAnswer::Target),
        _ => Err(Error::PromiseViolation(format!(
            "learned stabilizers {}, {} match neither I nor {}",
            learned.pair[0], learned.pair[1], wp.target
        ))),
    }
}
