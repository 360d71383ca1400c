//! Output distributions of the cyclic teleportation circuit `Telep_n` and the
//! Pauli-corrected Clifford product circuit `CliffP(Q)_L`.
//!
//! Exact probabilities go through Clifford algebra only: every product of
//! Cliffords and Pauli outcomes is again a Clifford `U`, and `|tr U|²` is
//! read off from a stabilizer overlap. Complex traces and the dense
//! state-vector simulation are kept as independent cross-checks.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bell::{state_of, StabilizerPair};
use crate::error::{Error, Result};
use crate::group::clifford::pauli_matrix;
use crate::group::matrix::{self, Mat2};
use crate::group::{product_of_sequence, Clifford1, PauliLabel, CLIFFORD_ORDER};

/// Largest `n` for which full distributions over `4^n` outcomes are built.
pub const MAX_EXHAUSTIVE_N: usize = 8;
/// Largest `n` for the `2n`-qubit dense simulation.
pub const MAX_STATEVECTOR_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TelepInstanceJson", into = "TelepInstanceJson")]
pub struct TelepInstance {
    pub cliffords: Vec<Clifford1>,
}

#[derive(Serialize, Deserialize)]
struct TelepInstanceJson {
    n: usize,
    cliffords: Vec<Clifford1>,
}

impl TryFrom<TelepInstanceJson> for TelepInstance {
    type Error = Error;

    fn try_from(raw: TelepInstanceJson) -> Result<Self> {
        if raw.n != raw.cliffords.len() {
            return Err(Error::LengthMismatch {
                what: "telep instance",
                expected: raw.n,
                got: raw.cliffords.len(),
            });
        }
        TelepInstance::new(raw.cliffords)
    }
}

impl From<TelepInstance> for TelepInstanceJson {
    fn from(inst: TelepInstance) -> Self {
        TelepInstanceJson {
            n: inst.cliffords.len(),
            cliffords: inst.cliffords,
        }
    }
}

impl TelepInstance {
    pub fn new(cliffords: Vec<Clifford1>) -> Result<Self> {
        if cliffords.is_empty() {
            return Err(Error::InvalidInput("telep instance needs n ≥ 1".into()));
        }
        Ok(TelepInstance { cliffords })
    }

    pub fn n(&self) -> usize {
        self.cliffords.len()
    }

    pub fn codes(&self) -> impl Iterator<Item = u8> + '_ {
        self.cliffords.iter().map(|c| c.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TelepOutcome {
    pub paulis: Vec<PauliLabel>,
}

impl TelepOutcome {
    pub fn new(paulis: Vec<PauliLabel>) -> Self {
        TelepOutcome { paulis }
    }

    pub fn identity(n: usize) -> Self {
        TelepOutcome {
            paulis: vec![PauliLabel::I; n],
        }
    }

    pub fn len(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paulis.is_empty()
    }

    /// Index `Σ code(P_j)·4^j`, matching the order of [`telep_distribution`].
    pub fn index(&self) -> usize {
        self.paulis
            .iter()
            .rev()
            .fold(0, |acc, p| acc * 4 + usize::from(p.code()))
    }

    pub fn from_index(mut index: usize, n: usize) -> Self {
        let paulis = (0..n)
            .map(|_| {
                let p = PauliLabel::from_code((index % 4) as u8).expect("digit < 4");
                index /= 4;
                p
            })
            .collect();
        TelepOutcome { paulis }
    }
}

impl fmt::Display for TelepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.paulis {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PCliffInstanceJson", into = "PCliffInstanceJson")]
pub struct PCliffInstance {
    /// `(C_1, …, C_L)`, applied first to last.
    pub cliffords: Vec<Clifford1>,
    pub d: Clifford1,
}

#[derive(Serialize, Deserialize)]
struct PCliffInstanceJson {
    #[serde(rename = "L")]
    l: usize,
    cliffords: Vec<Clifford1>,
    d: Clifford1,
}

impl TryFrom<PCliffInstanceJson> for PCliffInstance {
    type Error = Error;

    fn try_from(raw: PCliffInstanceJson) -> Result<Self> {
        if raw.l != raw.cliffords.len() {
            return Err(Error::LengthMismatch {
                what: "pcliff instance",
                expected: raw.l,
                got: raw.cliffords.len(),
            });
        }
        PCliffInstance::new(raw.cliffords, raw.d)
    }
}

impl From<PCliffInstance> for PCliffInstanceJson {
    fn from(inst: PCliffInstance) -> Self {
        PCliffInstanceJson {
            l: inst.cliffords.len(),
            cliffords: inst.cliffords,
            d: inst.d,
        }
    }
}

impl PCliffInstance {
    pub fn new(cliffords: Vec<Clifford1>, d: Clifford1) -> Result<Self> {
        if cliffords.is_empty() {
            return Err(Error::InvalidInput("pcliff instance needs L ≥ 1".into()));
        }
        Ok(PCliffInstance { cliffords, d })
    }

    pub fn len(&self) -> usize {
        self.cliffords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliffords.is_empty()
    }

    /// `C_L ⋯ C_1`.
    pub fn product(&self) -> Clifford1 {
        product_of_sequence(&self.cliffords)
    }
}

/// A fixed Pauli correction `Q(C_1, …, C_L)`.
pub trait CorrectionFn: Send + Sync {
    fn correction(&self, cliffords: &[Clifford1]) -> PauliLabel;
}

impl<F> CorrectionFn for F
where
    F: Fn(&[Clifford1]) -> PauliLabel + Send + Sync,
{
    fn correction(&self, cliffords: &[Clifford1]) -> PauliLabel {
        self(cliffords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantCorrection(pub PauliLabel);

impl CorrectionFn for ConstantCorrection {
    fn correction(&self, _: &[Clifford1]) -> PauliLabel {
        self.0
    }
}

/// Explicit correction table. Missing entries default to `I`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorrectionTable {
    pub l: usize,
    pub entries: BTreeMap<Vec<u8>, PauliLabel>,
}

#[derive(Serialize, Deserialize)]
struct CorrectionTableJson {
    #[serde(rename = "L")]
    l: usize,
    entries: BTreeMap<String, u8>,
}

impl CorrectionTable {
    pub fn new(l: usize) -> Self {
        CorrectionTable {
            l,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, cliffords: &[Clifford1], q: PauliLabel) -> Result<()> {
        if cliffords.len() != self.l {
            return Err(Error::LengthMismatch {
                what: "correction table key",
                expected: self.l,
                got: cliffords.len(),
            });
        }
        self.entries.insert(cliffords.iter().map(|c| c.code()).collect(), q);
        Ok(())
    }

    /// Tabulate any correction function over all `24^L` inputs.
    pub fn tabulate(l: usize, q: &dyn CorrectionFn) -> Result<Self> {
        if l > 3 {
            return Err(Error::SizeLimit {
                what: "correction table length",
                size: l,
                limit: 3,
            });
        }
        let mut table = CorrectionTable::new(l);
        for idx in 0..CLIFFORD_ORDER.pow(l as u32) {
            let key = clifford_tuple(idx, l);
            table.insert(&key, q.correction(&key))?;
        }
        Ok(table)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CorrectionTableJson = serde_json::from_str(s)?;
        let mut table = CorrectionTable::new(raw.l);
        for (key, q) in raw.entries {
            let codes = key
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|e| Error::InvalidInput(format!("table key {key:?}: {e}")))
                        .and_then(Clifford1::from_code)
                })
                .collect::<Result<Vec<_>>>()?;
            table.insert(&codes, PauliLabel::from_code(q)?)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let raw = CorrectionTableJson {
            l: self.l,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| {
                    let key: Vec<String> = k.iter().map(u8::to_string).collect();
                    (key.join(","), v.code())
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("table serializes")
    }
}

impl CorrectionFn for CorrectionTable {
    fn correction(&self, cliffords: &[Clifford1]) -> PauliLabel {
        let key: Vec<u8> = cliffords.iter().map(|c| c.code()).collect();
        self.entries.get(&key).copied().unwrap_or(PauliLabel::I)
    }
}

/// The `idx`-th tuple of `l` Cliffords in little-endian base-24 order.
pub fn clifford_tuple(mut idx: usize, l: usize) -> Vec<Clifford1> {
    (0..l)
        .map(|_| {
            let c = Clifford1::from_code((idx % CLIFFORD_ORDER) as u8).expect("code < 24");
            idx /= CLIFFORD_ORDER;
            c
        })
        .collect()
}

fn signed_overlap(a: &StabilizerPair, b: &StabilizerPair) -> u32 {
    let ga = a.group();
    let gb = b.group();
    let mut shared = 0;
    for x in ga {
        for y in gb {
            if x == y {
                shared += 1;
            } else if x.unsigned_part() == y.unsigned_part() {
                return 0;
            }
        }
    }
    shared
}

static TRACE_NORM_SQ: LazyLock<[u32; CLIFFORD_ORDER]> = LazyLock::new(|| {
    let phi = StabilizerPair::bell();
    let mut out = [0; CLIFFORD_ORDER];
    for c in Clifford1::all() {
        // |tr U|² = 4·|⟨Φ|(I⊗U)|Φ⟩|² and the overlap of two-qubit stabilizer
        // states is |G_a ∩ G_b|/4, or 0 when the groups disagree on a sign.
        out[usize::from(c.code())] = signed_overlap(&phi, &state_of(c));
    }
    out
});

/// `|tr U|² ∈ {0, 1, 2, 4}` for any representative `U` of `c`.
pub fn trace_norm_sq(c: Clifford1) -> u32 {
    TRACE_NORM_SQ[usize::from(c.code())]
}

fn check_lengths(inst: &TelepInstance, out: &TelepOutcome) -> Result<()> {
    if inst.n() != out.len() {
        return Err(Error::LengthMismatch {
            what: "telep outcome",
            expected: inst.n(),
            got: out.len(),
        });
    }
    Ok(())
}

/// `P_{n-1} C_{n-1} ⋯ P_0 C_0` as a Clifford (global phase dropped).
pub fn telep_product(inst: &TelepInstance, out: &TelepOutcome) -> Result<Clifford1> {
    check_lengths(inst, out)?;
    Ok(inst
        .cliffords
        .iter()
        .zip(&out.paulis)
        .fold(Clifford1::identity(), |acc, (c, p)| {
            Clifford1::pauli(*p).compose(c.compose(acc))
        }))
}

/// `tr(P_{n-1} C_{n-1} ⋯ P_0 C_0)` using the matrix representatives of
/// [`Clifford1::matrix`].
pub fn telep_trace(inst: &TelepInstance, out: &TelepOutcome) -> Result<Complex64> {
    check_lengths(inst, out)?;
    let m = inst
        .cliffords
        .iter()
        .zip(&out.paulis)
        .fold(matrix::identity(), |acc, (c, p)| {
            matrix::mul(&pauli_matrix(*p), &matrix::mul(&c.matrix(), &acc))
        });
    Ok(matrix::trace(&m))
}

pub fn telep_prob(inst: &TelepInstance, out: &TelepOutcome) -> Result<f64> {
    let t = trace_norm_sq(telep_product(inst, out)?);
    Ok(f64::from(t) * 0.25f64.powi(inst.n() as i32))
}

pub fn telep_support(inst: &TelepInstance, out: &TelepOutcome) -> Result<bool> {
    Ok(trace_norm_sq(telep_product(inst, out)?) != 0)
}

/// Probabilities of all `4^n` outcomes, indexed by [`TelepOutcome::index`].
pub fn telep_distribution(inst: &TelepInstance) -> Result<Vec<f64>> {
    let n = inst.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::SizeLimit {
            what: "exhaustive telep n",
            size: n,
            limit: MAX_EXHAUSTIVE_N,
        });
    }
    (0..1usize << (2 * n))
        .map(|idx| telep_prob(inst, &TelepOutcome::from_index(idx, n)))
        .collect()
}

/// Distribution of the last outcome given the first `n-1`, as `|tr|²` weights
/// summing to 4.
pub fn telep_last_weights(inst: &TelepInstance, prefix: &[PauliLabel]) -> Result<[u32; 4]> {
    let n = inst.n();
    if prefix.len() + 1 != n {
        return Err(Error::LengthMismatch {
            what: "telep outcome prefix",
            expected: n - 1,
            got: prefix.len(),
        });
    }
    let mut paulis = prefix.to_vec();
    paulis.push(PauliLabel::I);
    let base = telep_product(inst, &TelepOutcome::new(paulis))?;
    Ok(PauliLabel::ALL.map(|p| trace_norm_sq(Clifford1::pauli(p).compose(base))))
}

/// `P · D · Q · C_L ⋯ C_1`.
pub fn pcliff_product(q: &dyn CorrectionFn, inst: &PCliffInstance, p: PauliLabel) -> Clifford1 {
    let corr = Clifford1::pauli(q.correction(&inst.cliffords));
    Clifford1::pauli(p)
        .compose(inst.d)
        .compose(corr)
        .compose(inst.product())
}

pub fn pcliff_trace(q: &dyn CorrectionFn, inst: &PCliffInstance, p: PauliLabel) -> Complex64 {
    let corr = pauli_matrix(q.correction(&inst.cliffords));
    let mut m = matrix::mul(&pauli_matrix(p), &inst.d.matrix());
    m = matrix::mul(&m, &corr);
    for c in inst.cliffords.iter().rev() {
        m = matrix::mul(&m, &c.matrix());
    }
    matrix::trace(&m)
}

pub fn pcliff_prob(q: &dyn CorrectionFn, inst: &PCliffInstance, p: PauliLabel) -> f64 {
    f64::from(trace_norm_sq(pcliff_product(q, inst, p))) / 4.0
}

pub fn pcliff_support(q: &dyn CorrectionFn, inst: &PCliffInstance, p: PauliLabel) -> bool {
    trace_norm_sq(pcliff_product(q, inst, p)) != 0
}

/// Probabilities of `I, X, Y, Z`.
pub fn pcliff_distribution(q: &dyn CorrectionFn, inst: &PCliffInstance) -> [f64; 4] {
    PauliLabel::ALL.map(|p| pcliff_prob(q, inst, p))
}

/// Dense amplitudes over `num_qubits` qubits, qubit `k` being bit `k` of the index.
struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    fn apply_1q(&mut self, q: usize, u: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }
}

/// Simulate the teleportation circuit literally on `2n` qubits.
///
/// Pair `j` is `(a_j, b_j) = (2j, 2j+1)`, prepared in `|Φ⟩`; `C_j` acts on
/// `b_j`; Bell measurement `j` acts on `(b_j, a_{j+1 mod n})`.
pub fn statevector_distribution(inst: &TelepInstance) -> Result<Vec<f64>> {
    let n = inst.n();
    if n > MAX_STATEVECTOR_N {
        return Err(Error::SizeLimit {
            what: "state-vector telep n",
            size: n,
            limit: MAX_STATEVECTOR_N,
        });
    }
    let q = 2 * n;
    let amp = std::f64::consts::FRAC_1_SQRT_2.powi(n as i32);
    let amps = (0..1usize << q)
        .map(|i| {
            let paired = (0..n).all(|j| (i >> (2 * j)) & 1 == (i >> (2 * j + 1)) & 1);
            Complex64::new(if paired { amp } else { 0.0 }, 0.0)
        })
        .collect();
    let mut sv = StateVector { amps };
    for (j, c) in inst.cliffords.iter().enumerate() {
        sv.apply_1q(2 * j + 1, &c.matrix());
    }
    let h = matrix::hadamard();
    for j in 0..n {
        let b = 2 * j + 1;
        let a_next = 2 * ((j + 1) % n);
        sv.cnot(b, a_next);
        sv.apply_1q(b, &h);
    }
    let mut dist = vec![0.0; 1 << q];
    for (i, a) in sv.amps.iter().enumerate() {
        let mut idx = 0;
        for j in (0..n).rev() {
            let z = (i >> (2 * j + 1)) & 1 == 1;
            let x = (i >> (2 * ((j + 1) % n))) & 1 == 1;
            idx = idx * 4 + usize::from(PauliLabel::from_bits(x, z).code());
        }
        dist[idx] += a.norm_sqr();
    }
    Ok(dist)
}

/// Bell measurement of `(I ⊗ D Q C_L ⋯ C_1)|Φ⟩` simulated on two qubits.
pub fn pcliff_statevector_distribution(q: &dyn CorrectionFn, inst: &PCliffInstance) -> [f64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut sv = StateVector {
        amps: vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
        ],
    };
    for c in &inst.cliffords {
        sv.apply_1q(1, &c.matrix());
    }
    sv.apply_1q(1, &pauli_matrix(q.correction(&inst.cliffords)));
    sv.apply_1q(1, &inst.d.matrix());
    sv.cnot(1, 0);
    sv.apply_1q(1, &matrix::hadamard());
    let mut dist = [0.0; 4];
    for (i, a) in sv.amps.iter().enumerate() {
        let x = i & 1 == 1;
        let z = i & 2 != 0;
        dist[usize::from(PauliLabel::from_bits(x, z).code())] += a.norm_sqr();
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(codes: &[u8]) -> TelepInstance {
        TelepInstance::new(codes.iter().map(|&c| Clifford1::from_code(c).unwrap()).collect()).unwrap()
    }

    fn out(labels: &[PauliLabel]) -> TelepOutcome {
        TelepOutcome::new(labels.to_vec())
    }

    fn random_inst(rng: &mut ChaCha8Rng, n: usize) -> TelepInstance {
        inst(&(0..n).map(|_| rng.random_range(0..24)).collect::<Vec<_>>())
    }

    use PauliLabel::{I, X, Y, Z};

    #[test]
    fn trace_examples() {
        let one = |c| inst(&[c]);
        assert!((telep_trace(&one(0), &out(&[I])).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(telep_trace(&one(0), &out(&[X])).unwrap().norm() < 1e-12);
        let s = Clifford1::phase_s().code();
        assert!((telep_trace(&one(s), &out(&[I])).unwrap() - Complex64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_norm_matches_matrices() {
        for c in Clifford1::all() {
            let exact = f64::from(trace_norm_sq(c));
            assert!((matrix::trace(&c.matrix()).norm_sqr() - exact).abs() < 1e-9, "{c}");
        }
    }

    #[test]
    fn prob_examples() {
        let id = inst(&[0]);
        let probs: Vec<f64> = [I, X, Y, Z]
            .iter()
            .map(|p| telep_prob(&id, &out(&[*p])).unwrap())
            .collect();
        assert_eq!(probs, [1.0, 0.0, 0.0, 0.0]);
        let s = inst(&[Clifford1::phase_s().code()]);
        let probs: Vec<f64> = [I, X, Y, Z]
            .iter()
            .map(|p| telep_prob(&s, &out(&[*p])).unwrap())
            .collect();
        assert_eq!(probs, [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn support_examples() {
        assert!(telep_support(&inst(&[0]), &out(&[I])).unwrap());
        assert!(!telep_support(&inst(&[0]), &out(&[X])).unwrap());
        assert!(matches!(
            telep_support(&inst(&[0, 0]), &out(&[I])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn support_agrees_with_prob_exhaustively_for_n2() {
        for a in 0..24 {
            for b in 0..24 {
                let i = inst(&[a, b]);
                for idx in 0..16 {
                    let o = TelepOutcome::from_index(idx, 2);
                    let p = telep_prob(&i, &o).unwrap();
                    assert_eq!(telep_support(&i, &o).unwrap(), p > 0.0);
                    let t = telep_trace(&i, &o).unwrap().norm_sqr() / 16.0;
                    assert!((t - p).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn statevector_agrees_with_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..10 {
                let i = random_inst(&mut rng, n);
                let exact = telep_distribution(&i).unwrap();
                let sv = statevector_distribution(&i).unwrap();
                for (a, b) in exact.iter().zip(&sv) {
                    assert!((a - b).abs() < 1e-9, "{i:?}");
                }
                assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
        let point = statevector_distribution(&inst(&[0])).unwrap();
        assert!((point[0] - 1.0).abs() < 1e-12 && point[1..].iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn statevector_size_limit() {
        assert!(matches!(
            statevector_distribution(&inst(&[0; 7])),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn pcliff_examples() {
        let q = ConstantCorrection(I);
        let i = PCliffInstance::new(vec![Clifford1::identity()], Clifford1::identity()).unwrap();
        assert_eq!(pcliff_distribution(&q, &i), [1.0, 0.0, 0.0, 0.0]);
        let h = PCliffInstance::new(vec![Clifford1::hadamard()], Clifford1::identity()).unwrap();
        // |tr(XH)|² = |tr(ZH)|² = 2 and tr(H) = tr(YH) = 0.
        assert_eq!(pcliff_distribution(&q, &h), [0.0, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn pcliff_matches_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let l = rng.random_range(1..=3);
            let cl: Vec<_> = (0..l)
                .map(|_| Clifford1::from_code(rng.random_range(0..24)).unwrap())
                .collect();
            let d = Clifford1::from_code(rng.random_range(0..24)).unwrap();
            let qv = PauliLabel::from_code(rng.random_range(0..4)).unwrap();
            let inst = PCliffInstance::new(cl, d).unwrap();
            let q = ConstantCorrection(qv);
            let a = pcliff_distribution(&q, &inst);
            let b = pcliff_statevector_distribution(&q, &inst);
            for p in 0..4 {
                assert!((a[p] - b[p]).abs() < 1e-9);
                let t = pcliff_trace(&q, &inst, PauliLabel::ALL[p]).norm_sqr() / 4.0;
                assert!((a[p] - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn json_formats() {
        let i: TelepInstance = serde_json::from_str(r#"{"n":2,"cliffords":[0,23]}"#).unwrap();
        assert_eq!(i.n(), 2);
        assert_eq!(serde_json::to_string(&i).unwrap(), r#"{"n":2,"cliffords":[0,23]}"#);
        assert!(serde_json::from_str::<TelepInstance>(r#"{"n":1,"cliffords":[24]}"#).is_err());
        assert!(serde_json::from_str::<TelepInstance>(r#"{"n":2,"cliffords":[0]}"#).is_err());
        let o: TelepOutcome = serde_json::from_str(r#"{"paulis":[0,3]}"#).unwrap();
        assert_eq!(o.paulis, vec![I, Z]);

        let t = CorrectionTable::from_json(r#"{"L":2,"entries":{"1,2":3,"0,0":1}}"#).unwrap();
        let h = Clifford1::hadamard();
        let s = Clifford1::phase_s();
        assert_eq!(t.correction(&[h, s]), Z);
        assert_eq!(t.correction(&[s, h]), I);
        assert_eq!(CorrectionTable::from_json(&t.to_json()).unwrap(), t);
        assert!(CorrectionTable::from_json(r#"{"L":1,"entries":{"1,2":3}}"#).is_err());
    }

    #[test]
    fn outcome_index_round_trip() {
        for idx in 0..256 {
            assert_eq!(TelepOutcome::from_index(idx, 4).index(), idx);
        }
    }

    proptest! {
        #[test]
        fn normalization(codes in proptest::collection::vec(0u8..24, 1..=4)) {
            let i = inst(&codes);
            let total: f64 = telep_distribution(&i).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pauli_shift_is_absorbed_by_next_outcome(
            codes in proptest::collection::vec(0u8..24, 2..=5),
            outs in proptest::collection::vec(0u8..4, 5),
            j in 0usize..4,
            shift in 0u8..4,
        ) {
            let n = codes.len();
            let j = j % (n - 1);
            let shift = PauliLabel::from_code(shift).unwrap();
            let base = inst(&codes);
            let o: Vec<_> = outs[..n].iter().map(|&p| PauliLabel::from_code(p).unwrap()).collect();
            // C_j → C_j·Q with P_{j-1} → P_{j-1}·Q (cyclically) leaves the product unchanged.
            let mut shifted = base.clone();
            shifted.cliffords[j + 1] = shifted.cliffords[j + 1].compose(Clifford1::pauli(shift));
            let mut o2 = o.clone();
            o2[j] = o2[j].times(shift);
            prop_assert_eq!(
                telep_support(&base, &out(&o)).unwrap(),
                telep_support(&shifted, &out(&o2)).unwrap()
            );
        }

        #[test]
        fn pcliff_single_layer_is_a_bell_measurement(c in 0u8..24, d in 0u8..24) {
            let c = Clifford1::from_code(c).unwrap();
            let d = Clifford1::from_code(d).unwrap();
            let inst = PCliffInstance::new(vec![c], d).unwrap();
            for p in PauliLabel::ALL {
                let direct = f64::from(trace_norm_sq(Clifford1::pauli(p).compose(d).compose(c))) / 4.0;
                prop_assert_eq!(pcliff_prob(&ConstantCorrection(I), &inst, p), direct);
            }
        }
    }
}
