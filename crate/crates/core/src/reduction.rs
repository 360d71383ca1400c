//! Reduction from simulating `Telep_n` to simulating `CliffP(Q)_L`.
//!
//! A `CliffP` instance `(C_1, …, C_L, D)` is embedded as the telep instance
//! `(C_1, …, C_L, I, …, I, D, I, …, I)` with `D` at position `m`. From the
//! telep answer, the outcomes indexed by `J` are folded into a single Pauli
//! `P` (algorithm A). The remaining outcomes fold into a correction `Q` that
//! never depends on `D` when `J` covers everything `D` can influence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuits::telep_trace;
use crate::circuits::{pcliff_trace, ConstantCorrection, CorrectionFn, PCliffInstance, TelepInstance, TelepOutcome};
use crate::error::{Error, Result};
use crate::group::{product_of_sequence, Clifford1, PauliLabel, SignedPauli1};
use crate::oracle::{PcliffOracle, TelepOracle};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsJson", into = "ParamsJson")]
pub struct EmbeddingParams {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    /// Sorted, duplicate-free subset of `L..n`.
    pub j: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    m: usize,
    #[serde(rename = "J")]
    j: Vec<usize>,
}

impl TryFrom<ParamsJson> for EmbeddingParams {
    type Error = Error;

    fn try_from(raw: ParamsJson) -> Result<Self> {
        EmbeddingParams::new(raw.n, raw.l, raw.m, raw.j)
    }
}

impl From<EmbeddingParams> for ParamsJson {
    fn from(p: EmbeddingParams) -> Self {
        ParamsJson {
            n: p.n,
            l: p.l,
            m: p.m,
            j: p.j,
        }
    }
}

impl EmbeddingParams {
    pub fn new(n: usize, l: usize, m: usize, mut j: Vec<usize>) -> Result<Self> {
        if l == 0 || l > m || m >= n {
            return Err(Error::InvalidInput(format!(
                "embedding needs 1 ≤ L ≤ m < n, got L={l}, m={m}, n={n}"
            )));
        }
        j.sort_unstable();
        j.dedup();
        if let Some(&bad) = j.iter().find(|&&x| x < l || x >= n) {
            return Err(Error::InvalidInput(format!("J contains {bad} outside {l}..{n}")));
        }
        Ok(EmbeddingParams { n, l, m, j })
    }

    /// Parameters for an oracle whose outcome `j` depends only on inputs
    /// `0..=j` except the last, which may depend on everything: `J = m..n`.
    pub fn causal(n: usize, l: usize, m: usize) -> Result<Self> {
        EmbeddingParams::new(n, l, m, (m..n).collect())
    }

    /// Parameters for an oracle whose only input-dependent outcome is the
    /// last one: `J = {n-1}`.
    pub fn last_only(n: usize, l: usize, m: usize) -> Result<Self> {
        EmbeddingParams::new(n, l, m, vec![n - 1])
    }

    fn in_j(&self, idx: usize) -> bool {
        self.j.binary_search(&idx).is_ok()
    }

    fn check_outcome(&self, out: &TelepOutcome) -> Result<()> {
        if out.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "telep outcome",
                expected: self.n,
                got: out.len(),
            });
        }
        Ok(())
    }

    fn check_cliffords(&self, cliffords: &[Clifford1]) -> Result<()> {
        if cliffords.len() != self.l {
            return Err(Error::LengthMismatch {
                what: "pcliff cliffords",
                expected: self.l,
                got: cliffords.len(),
            });
        }
        Ok(())
    }
}

pub fn embed(inst: &PCliffInstance, params: &EmbeddingParams) -> Result<TelepInstance> {
    params.check_cliffords(&inst.cliffords)?;
    let mut cliffords = vec![Clifford1::identity(); params.n];
    cliffords[..params.l].copy_from_slice(&inst.cliffords);
    cliffords[params.m] = inst.d;
    TelepInstance::new(cliffords)
}

/// `∏_{idx ∈ range, in_j(idx) == want} P_idx` in increasing index order.
fn fold_outcomes(
    params: &EmbeddingParams,
    out: &TelepOutcome,
    range: std::ops::Range<usize>,
    want: bool,
) -> SignedPauli1 {
    range
        .filter(|&i| params.in_j(i) == want)
        .fold(SignedPauli1::IDENTITY, |acc, i| {
            acc * SignedPauli1::from_label(out.paulis[i])
        })
}

/// `unsigned(P′ · D P″ D†)` with `P′` the `J`-outcomes in `m..n` and `P″`
/// those in `L..m`.
pub fn algorithm_a(params: &EmbeddingParams, out: &TelepOutcome, d: Clifford1) -> Result<PauliLabel> {
    params.check_outcome(out)?;
    let p1 = fold_outcomes(params, out, params.m..params.n, true);
    let p2 = fold_outcomes(params, out, params.l..params.m, true);
    Ok((p1 * d.conjugate(p2)).label())
}

/// The correction `Q = Q″ · Q‴ · (∏C) Q′ (∏C)†` built from the outcomes
/// outside `J`. `Q′` and `Q″` collect those in `m..n` and `L..m`; `Q‴` is
/// the prefix outcomes pushed through `C_L ⋯ C_1`.
pub fn compute_q_correction(
    params: &EmbeddingParams,
    out: &TelepOutcome,
    cliffords: &[Clifford1],
) -> Result<PauliLabel> {
    params.check_outcome(out)?;
    params.check_cliffords(cliffords)?;
    let q1 = fold_outcomes(params, out, params.m..params.n, false);
    let q2 = fold_outcomes(params, out, params.l..params.m, false);
    let q3 = cliffords
        .iter()
        .enumerate()
        .fold(SignedPauli1::IDENTITY, |acc, (t, c)| {
            SignedPauli1::from_label(out.paulis[t]) * c.conjugate(acc)
        });
    let prod = product_of_sequence(cliffords);
    Ok((q2 * q3 * prod.conjugate(q1)).label())
}

/// `| |alternating trace| − |tr(P·D·Q·∏C)| |` with `P` from algorithm A and
/// `Q` from [`compute_q_correction`] unless `q_override` is given.
pub fn commuting_identity_gap(
    params: &EmbeddingParams,
    out: &TelepOutcome,
    cliffords: &[Clifford1],
    d: Clifford1,
    q_override: Option<PauliLabel>,
) -> Result<f64> {
    let inst = PCliffInstance::new(cliffords.to_vec(), d)?;
    let lhs = telep_trace(&embed(&inst, params)?, out)?.norm();
    let p = algorithm_a(params, out, d)?;
    let q = match q_override {
        Some(q) => q,
        None => compute_q_correction(params, out, cliffords)?,
    };
    let rhs = pcliff_trace(&ConstantCorrection(q), &inst, p).norm();
    Ok((lhs - rhs).abs())
}

pub const IDENTITY_TOLERANCE: f64 = 1e-9;

pub fn verify_commuting_identity(
    params: &EmbeddingParams,
    out: &TelepOutcome,
    cliffords: &[Clifford1],
    d: Clifford1,
) -> Result<bool> {
    Ok(commuting_identity_gap(params, out, cliffords, d, None)? < IDENTITY_TOLERANCE)
}

/// One telep query on the embedded instance, decoded by algorithm A.
pub fn algorithm_b(oracle: &dyn TelepOracle, params: &EmbeddingParams, inst: &PCliffInstance) -> Result<PauliLabel> {
    let answer = oracle.query(&embed(inst, params)?)?;
    algorithm_a(params, &answer, inst.d)
}

/// The correction implied by the oracle's answers: query with `D = I` and
/// fold the outcomes outside `J`.
pub fn induced_correction(
    oracle: &dyn TelepOracle,
    params: &EmbeddingParams,
    cliffords: &[Clifford1],
) -> Result<PauliLabel> {
    let inst = PCliffInstance::new(cliffords.to_vec(), Clifford1::identity())?;
    let answer = oracle.query(&embed(&inst, params)?)?;
    compute_q_correction(params, &answer, cliffords)
}

/// [`induced_correction`] as a [`CorrectionFn`]. Panics if the underlying
/// oracle fails, since a correction function is total.
pub struct InducedCorrection {
    pub oracle: Arc<dyn TelepOracle>,
    pub params: EmbeddingParams,
}

impl CorrectionFn for InducedCorrection {
    fn correction(&self, cliffords: &[Clifford1]) -> PauliLabel {
        induced_correction(&*self.oracle, &self.params, cliffords)
            .unwrap_or_else(|e| panic!("induced correction undefined: {e}"))
    }
}

/// Algorithm B packaged as a `CliffP(Q)_L` oracle for the induced `Q`.
pub struct ReductionOracle {
    induced: InducedCorrection,
}

impl ReductionOracle {
    pub fn new(oracle: Arc<dyn TelepOracle>, params: EmbeddingParams) -> Self {
        ReductionOracle {
            induced: InducedCorrection { oracle, params },
        }
    }

    pub fn params(&self) -> &EmbeddingParams {
        &self.induced.params
    }
}

impl PcliffOracle for ReductionOracle {
    fn name(&self) -> String {
        format!("reduction({})", self.induced.oracle.name())
    }

    fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
        algorithm_b(&*self.induced.oracle, &self.induced.params, inst)
    }

    fn correction(&self) -> Option<&dyn CorrectionFn> {
        Some(&self.induced)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{pcliff_support, telep_support, CorrectionTable};
    use crate::oracle::{ConstantTelep, HonestTelep, SampledTelep};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use PauliLabel::{I, X, Z};

    fn c(code: u8) -> Clifford1 {
        Clifford1::from_code(code).unwrap()
    }

    fn random_case(rng: &mut ChaCha8Rng) -> (EmbeddingParams, TelepOutcome, Vec<Clifford1>, Clifford1) {
        let n = rng.random_range(2..=8);
        let l = rng.random_range(1..n);
        let m = rng.random_range(l..n);
        let j: Vec<usize> = (l..n).filter(|_| rng.random_bool(0.5)).collect();
        let params = EmbeddingParams::new(n, l, m, j).unwrap();
        let out = TelepOutcome::new(
            (0..n)
                .map(|_| PauliLabel::from_code(rng.random_range(0..4)).unwrap())
                .collect(),
        );
        let cl = (0..l).map(|_| c(rng.random_range(0..24))).collect();
        (params, out, cl, c(rng.random_range(0..24)))
    }

    #[test]
    fn embed_example() {
        let h = Clifford1::hadamard();
        let s = Clifford1::phase_s();
        let params = EmbeddingParams::new(3, 1, 2, vec![2]).unwrap();
        let inst = PCliffInstance::new(vec![h], s).unwrap();
        assert_eq!(
            embed(&inst, &params).unwrap().cliffords,
            vec![h, Clifford1::identity(), s]
        );
        let bad = PCliffInstance::new(vec![h, h], s).unwrap();
        assert!(matches!(embed(&bad, &params), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn params_validation_and_json() {
        assert!(EmbeddingParams::new(4, 2, 1, vec![]).is_err());
        assert!(EmbeddingParams::new(4, 1, 2, vec![0]).is_err());
        let p: EmbeddingParams = serde_json::from_str(r#"{"n":8,"L":2,"m":5,"J":[6,5]}"#).unwrap();
        assert_eq!(p.j, vec![5, 6]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"n":8,"L":2,"m":5,"J":[5,6]}"#);
    }

    #[test]
    fn algorithm_a_examples() {
        let h = Clifford1::hadamard();
        let params = EmbeddingParams::new(5, 1, 3, vec![3]).unwrap();
        assert_eq!(algorithm_a(&params, &TelepOutcome::identity(5), h).unwrap(), I);
        let out = TelepOutcome::new(vec![I, I, I, X, I]);
        assert_eq!(algorithm_a(&params, &out, h).unwrap(), X);
        let params = EmbeddingParams::new(5, 1, 3, vec![2, 3]).unwrap();
        let out = TelepOutcome::new(vec![I, I, Z, X, I]);
        assert_eq!(algorithm_a(&params, &out, h).unwrap(), I);
    }

    #[test]
    fn q_of_identity_outcomes() {
        let params = EmbeddingParams::new(4, 2, 3, vec![3]).unwrap();
        let q = compute_q_correction(&params, &TelepOutcome::identity(4), &[c(5), c(17)]).unwrap();
        assert_eq!(q, I);
    }

    #[test]
    fn identity_holds_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let (params, out, cl, d) = random_case(&mut rng);
            assert!(
                verify_commuting_identity(&params, &out, &cl, d).unwrap(),
                "{params:?} {out}"
            );
        }
        let params = EmbeddingParams::new(2, 1, 1, vec![1]).unwrap();
        assert!(verify_commuting_identity(&params, &TelepOutcome::identity(2), &[c(0)], c(0)).unwrap());
    }

    #[test]
    fn corrupted_q_breaks_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut broken = 0;
        for _ in 0..200 {
            let (params, out, cl, d) = random_case(&mut rng);
            let q = compute_q_correction(&params, &out, &cl).unwrap();
            let gap = commuting_identity_gap(&params, &out, &cl, d, Some(q.times(X))).unwrap();
            if gap > IDENTITY_TOLERANCE {
                broken += 1;
            }
        }
        assert!(broken > 0);
    }

    #[test]
    fn a_and_q_see_disjoint_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let (params, out, cl, d) = random_case(&mut rng);
            let a = algorithm_a(&params, &out, d).unwrap();
            let q = compute_q_correction(&params, &out, &cl).unwrap();
            let mut other = out.clone();
            for (i, p) in other.paulis.iter_mut().enumerate() {
                let fresh = PauliLabel::from_code(rng.random_range(0..4)).unwrap();
                if params.in_j(i) {
                    assert_eq!(q, {
                        let mut o = out.clone();
                        o.paulis[i] = fresh;
                        compute_q_correction(&params, &o, &cl).unwrap()
                    });
                } else {
                    *p = fresh;
                }
            }
            assert_eq!(algorithm_a(&params, &other, d).unwrap(), a);
        }
    }

    #[test]
    fn reduction_is_sound_for_l1_exhaustively() {
        let lexmin: Arc<dyn TelepOracle> = Arc::new(HonestTelep);
        let sampled: Arc<dyn TelepOracle> = Arc::new(SampledTelep { seed: 3 });
        let cases = [
            (lexmin, EmbeddingParams::last_only(3, 1, 2).unwrap()),
            (sampled, EmbeddingParams::causal(4, 1, 2).unwrap()),
        ];
        for (oracle, params) in cases {
            let red = ReductionOracle::new(oracle.clone(), params.clone());
            let table = CorrectionTable::tabulate(1, red.correction().unwrap()).unwrap();
            for a in Clifford1::all() {
                for d in Clifford1::all() {
                    let inst = PCliffInstance::new(vec![a], d).unwrap();
                    let telep = embed(&inst, &params).unwrap();
                    assert!(telep_support(&telep, &oracle.query(&telep).unwrap()).unwrap());
                    let p = red.query(&inst).unwrap();
                    assert!(pcliff_support(&table, &inst, p), "{}", oracle.name());
                }
            }
        }
    }

    #[test]
    fn identity_instance_gives_identity() {
        let params = EmbeddingParams::last_only(4, 2, 3).unwrap();
        let inst = PCliffInstance::new(vec![c(0), c(0)], c(0)).unwrap();
        assert_eq!(algorithm_b(&HonestTelep, &params, &inst).unwrap(), I);
    }

    #[test]
    fn rigged_oracle_is_flagged() {
        // constant-I answers are out of support for C_1 = H, D = I
        let params = EmbeddingParams::last_only(3, 1, 2).unwrap();
        let red = ReductionOracle::new(Arc::new(ConstantTelep(I)), params);
        let inst = PCliffInstance::new(vec![Clifford1::hadamard()], Clifford1::identity()).unwrap();
        let p = red.query(&inst).unwrap();
        assert!(!pcliff_support(red.correction().unwrap(), &inst, p));
    }
}
