//! Possibilistic simulation oracles and the registry that names them.
//!
//! An oracle is a pure function from instances to outcomes. Honest oracles
//! answer from the exact distribution; adversarial ones pick worst-case
//! support elements; candidate simulators (constant answers, block circuits)
//! carry no guarantee and are what [`falsify_simulator`] is for.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::Rng;

use crate::circuits::{
    pcliff_product, telep_last_weights, telep_support, trace_norm_sq, CorrectionFn, PCliffInstance, TelepInstance,
    TelepOutcome,
};
use crate::error::{Error, Result};
use crate::group::{Clifford1, PauliLabel};
use crate::hashing::StableHasher;

pub trait TelepOracle: Send + Sync {
    fn name(&self) -> String;
    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome>;
}

pub trait PcliffOracle: Send + Sync {
    fn name(&self) -> String;
    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel>;
    /// The correction function the answers are meant to be consistent with,
    /// when the oracle knows it.
    fn correction(&self) -> Option<&dyn CorrectionFn>;
}

impl<T: TelepOracle + ?Sized> TelepOracle for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        (**self).query(inst)
    }
}

impl<T: TelepOracle + ?Sized> TelepOracle for Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        (**self).query(inst)
    }
}

impl<T: PcliffOracle + ?Sized> PcliffOracle for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        (**self).query(inst)
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        (**self).correction()
    }
}

impl<T: PcliffOracle + ?Sized> PcliffOracle for Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        (**self).query(inst)
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        (**self).correction()
    }
}

fn codes(cliffords: &[Clifford1]) -> impl Iterator<Item = u8> + '_ {
    cliffords.iter().map(|c| c.code())
}

fn argmax_first(weights: [u32; 4]) -> PauliLabel {
    let best = weights.iter().copied().max().unwrap_or(0);
    PauliLabel::ALL[weights.iter().position(|&w| w == best).unwrap_or(0)]
}

fn sample_weighted(weights: [u32; 4], r: u64) -> PauliLabel {
    let total: u32 = weights.iter().sum();
    let mut t = (r % u64::from(total)) as u32;
    for (p, w) in PauliLabel::ALL.into_iter().zip(weights) {
        if t < w {
            return p;
        }
        t -= w;
    }
    unreachable!("weights sum to total")
}

/// Lexicographically least outcome of maximal probability.
///
/// Every prefix `(P_0, …, P_{n-2})` leaves the same multiset of last-outcome
/// weights (moving the prefix Paulis to the left only permutes `P_{n-1}`),
/// so the all-`I` prefix already attains the maximum.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestTelep;

impl TelepOracle for HonestTelep {
    fn name(&self) -> String {
        "honest".into()
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        let prefix = vec![PauliLabel::I; inst.n() - 1];
        let last = argmax_first(telep_last_weights(inst, &prefix)?);
        let mut paulis = prefix;
        paulis.push(last);
        Ok(TelepOutcome::new(paulis))
    }
}

/// Samples from the exact distribution, with randomness derived from
/// `(seed, query)` so the oracle is a function.
///
/// The prefix marginal is uniform, and `P_j` for `j < n-1` is drawn from a
/// hash of `C_0, …, C_j` only. The last outcome is drawn from its
/// conditional distribution given the prefix.
#[derive(Debug, Clone, Copy)]
pub struct SampledTelep {
    pub seed: u64,
}

impl TelepOracle for SampledTelep {
    fn name(&self) -> String {
        format!("honest-sampled({})", self.seed)
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        let n = inst.n();
        let prefix: Vec<PauliLabel> = (0..n - 1)
            .map(|j| {
                let h = StableHasher::new(self.seed)
                    .word(1)
                    .bytes(codes(&inst.cliffords[..=j]))
                    .finish();
                PauliLabel::from_code((h % 4) as u8).expect("< 4")
            })
            .collect();
        let weights = telep_last_weights(inst, &prefix)?;
        let h = StableHasher::new(self.seed).word(2).bytes(inst.codes()).finish();
        let mut paulis = prefix;
        paulis.push(sample_weighted(weights, h));
        Ok(TelepOutcome::new(paulis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialStrategy {
    LexMin,
    LexMax,
    Hashed,
}

impl AdversarialStrategy {
    pub fn for_seed(seed: u64) -> Self {
        match seed % 3 {
            0 => AdversarialStrategy::LexMax,
            1 => AdversarialStrategy::Hashed,
            _ => AdversarialStrategy::LexMin,
        }
    }

    fn pick(self, supported: &[PauliLabel], h: u64) -> PauliLabel {
        match self {
            AdversarialStrategy::LexMin => supported[0],
            AdversarialStrategy::LexMax => supported[supported.len() - 1],
            AdversarialStrategy::Hashed => supported[(h % supported.len() as u64) as usize],
        }
    }
}

/// Support-consistent telep oracle with a hashed prefix and a seeded choice
/// among the supported last outcomes.
#[derive(Debug, Clone, Copy)]
pub struct AdversarialTelep {
    pub seed: u64,
}

impl TelepOracle for AdversarialTelep {
    fn name(&self) -> String {
        format!("adversarial({})", self.seed)
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        let mut rng = StableHasher::new(self.seed).word(3).bytes(inst.codes()).rng();
        let prefix: Vec<PauliLabel> = (0..inst.n() - 1)
            .map(|_| PauliLabel::from_code(rng.random_range(0..4)).expect("< 4"))
            .collect();
        let weights = telep_last_weights(inst, &prefix)?;
        let supported: Vec<PauliLabel> = PauliLabel::ALL
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0)
            .map(|(p, _)| p)
            .collect();
        let last = AdversarialStrategy::for_seed(self.seed).pick(&supported, rng.random());
        let mut paulis = prefix;
        paulis.push(last);
        Ok(TelepOutcome::new(paulis))
    }
}

/// Candidate simulator that always answers `(P, …, P)`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantTelep(pub PauliLabel);

impl TelepOracle for ConstantTelep {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        Ok(TelepOutcome::new(vec![self.0; inst.n()]))
    }
}

/// Pseudo-random correction function `Q(C_1, …, C_L)` derived from a seed.
#[derive(Debug, Clone, Copy)]
pub struct HashedCorrection {
    pub seed: u64,
}

impl CorrectionFn for HashedCorrection {
    fn correction(&self, cliffords: &[Clifford1]) -> PauliLabel {
        let h = StableHasher::new(self.seed).word(4).bytes(codes(cliffords)).finish();
        PauliLabel::from_code((h % 4) as u8).expect("< 4")
    }
}

fn supported_labels(q: &dyn CorrectionFn, inst: &PCliffInstance) -> Vec<PauliLabel> {
    PauliLabel::ALL
        .into_iter()
        .filter(|&p| trace_norm_sq(pcliff_product(q, inst, p)) > 0)
        .collect()
}

/// Lexicographically least most-likely answer for a fixed correction `Q`.
#[derive(Clone)]
pub struct HonestPcliff {
    q: Arc<dyn CorrectionFn>,
    label: String,
}

impl HonestPcliff {
    pub fn new(q: Arc<dyn CorrectionFn>) -> Self {
        HonestPcliff {
            q,
            label: "honest".into(),
        }
    }

    pub fn with_label(q: Arc<dyn CorrectionFn>, label: impl Into<String>) -> Self {
        HonestPcliff { q, label: label.into() }
    }
}

impl PcliffOracle for HonestPcliff {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        let weights = PauliLabel::ALL.map(|p| trace_norm_sq(pcliff_product(&*self.q, inst, p)));
        Ok(argmax_first(weights))
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        Some(&*self.q)
    }
}

/// Hidden pseudo-random `Q` plus a seeded worst-case choice among supported
/// answers.
#[derive(Debug, Clone, Copy)]
pub struct AdversarialPcliff {
    q: HashedCorrection,
    strategy: AdversarialStrategy,
    seed: u64,
}

impl AdversarialPcliff {
    pub fn new(seed: u64) -> Self {
        AdversarialPcliff {
            q: HashedCorrection {
                seed: seed ^ 0x5bd1_e995,
            },
            strategy: AdversarialStrategy::for_seed(seed),
            seed,
        }
    }

    pub fn strategy(&self) -> AdversarialStrategy {
        self.strategy
    }
}

impl PcliffOracle for AdversarialPcliff {
    fn name(&self) -> String {
        format!("adversarial({})", self.seed)
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        let supported = supported_labels(&self.q, inst);
        let h = StableHasher::new(self.seed)
            .word(5)
            .bytes(codes(&inst.cliffords))
            .word(u64::from(inst.d.code()))
            .finish();
        Ok(self.strategy.pick(&supported, h))
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        Some(&self.q)
    }
}

/// Rejects answers outside the support of `Telep_n`.
pub struct SupportCheckedTelep<O> {
    pub inner: O,
}

impl<O: TelepOracle> TelepOracle for SupportCheckedTelep<O> {
    fn name(&self) -> String {
        format!("checked({})", self.inner.name())
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        let out = self.inner.query(inst)?;
        if !telep_support(inst, &out)? {
            return Err(Error::ContractViolation(format!(
                "{} answered {out} on {:?}",
                self.inner.name(),
                inst.codes().collect::<Vec<_>>()
            )));
        }
        Ok(out)
    }
}

/// Rejects answers outside the support of `CliffP(Q)_L` for the oracle's own `Q`.
pub struct SupportCheckedPcliff<O> {
    pub inner: O,
}

impl<O: PcliffOracle> PcliffOracle for SupportCheckedPcliff<O> {
    fn name(&self) -> String {
        format!("checked({})", self.inner.name())
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        let p = self.inner.query(inst)?;
        let q = self
            .inner
            .correction()
            .ok_or_else(|| Error::Oracle(format!("{} does not expose its correction", self.inner.name())))?;
        if trace_norm_sq(pcliff_product(q, inst, p)) == 0 {
            return Err(Error::ContractViolation(format!(
                "{} answered {p} outside the support",
                self.inner.name()
            )));
        }
        Ok(p)
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        self.inner.correction()
    }
}

/// Counts queries; safe to share across threads.
pub struct CountingPcliff<O> {
    pub inner: O,
    count: AtomicUsize,
}

impl<O> CountingPcliff<O> {
    pub fn new(inner: O) -> Self {
        CountingPcliff {
            inner,
            count: AtomicUsize::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

impl<O: PcliffOracle> PcliffOracle for CountingPcliff<O> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.query(inst)
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        self.inner.correction()
    }
}

pub type TelepFactory = fn(u64) -> Box<dyn TelepOracle>;
pub type PcliffFactory = fn(u64) -> Box<dyn PcliffOracle>;

/// Named oracle constructors, keyed by the `--oracle` value.
pub struct OracleRegistry {
    telep: BTreeMap<&'static str, TelepFactory>,
    pcliff: BTreeMap<&'static str, PcliffFactory>,
}

impl Default for OracleRegistry {
    fn default() -> Self {
        let mut reg = OracleRegistry::empty();
        reg.register_telep("honest", |_| Box::new(HonestTelep));
        reg.register_telep("honest-sampled", |seed| Box::new(SampledTelep { seed }));
        reg.register_telep("adversarial", |seed| Box::new(AdversarialTelep { seed }));
        reg.register_telep("constant-identity", |_| Box::new(ConstantTelep(PauliLabel::I)));
        reg.register_pcliff("honest", |_| {
            Box::new(HonestPcliff::new(Arc::new(crate::circuits::ConstantCorrection(
                PauliLabel::I,
            ))))
        });
        reg.register_pcliff("adversarial", |seed| Box::new(AdversarialPcliff::new(seed)));
        reg
    }
}

impl OracleRegistry {
    pub fn empty() -> Self {
        OracleRegistry {
            telep: BTreeMap::new(),
            pcliff: BTreeMap::new(),
        }
    }

    pub fn register_telep(&mut self, name: &'static str, factory: TelepFactory) {
        self.telep.insert(name, factory);
    }

    pub fn register_pcliff(&mut self, name: &'static str, factory: PcliffFactory) {
        self.pcliff.insert(name, factory);
    }

    pub fn telep(&self, name: &str, seed: u64) -> Result<Box<dyn TelepOracle>> {
        self.telep
            .get(name)
            .map(|f| f(seed))
            .ok_or_else(|| unknown(name, self.telep_names()))
    }

    pub fn pcliff(&self, name: &str, seed: u64) -> Result<Box<dyn PcliffOracle>> {
        self.pcliff
            .get(name)
            .map(|f| f(seed))
            .ok_or_else(|| unknown(name, self.pcliff_names()))
    }

    pub fn telep_names(&self) -> Vec<&'static str> {
        self.telep.keys().copied().collect()
    }

    pub fn pcliff_names(&self) -> Vec<&'static str> {
        self.pcliff.keys().copied().collect()
    }
}

fn unknown(name: &str, known: Vec<&'static str>) -> Error {
    Error::InvalidInput(format!("unknown oracle {name:?}; known: {}", known.join(", ")))
}

/// A zero-probability answer found by [`falsify_simulator`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: TelepInstance,
    pub answer: TelepOutcome,
    pub trial: usize,
}

/// Query `candidate` on random instances of length `n` until it answers
/// outside the support.
pub fn falsify_simulator(
    candidate: &dyn TelepOracle,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>> {
    if n == 0 {
        return Err(Error::InvalidInput("falsifier needs n ≥ 1".into()));
    }
    let mut rng = StableHasher::new(seed).word(6).rng();
    for trial in 0..trials {
        let cliffords = (0..n)
            .map(|_| Clifford1::from_code(rng.random_range(0..24)))
            .collect::<Result<Vec<_>>>()?;
        let instance = TelepInstance::new(cliffords)?;
        let answer = candidate.query(&instance)?;
        if answer.len() != n || !telep_support(&instance, &answer)? {
            return Ok(Some(Counterexample {
                instance,
                answer,
                trial,
            }));
        }
    }
    Ok(None)
}
