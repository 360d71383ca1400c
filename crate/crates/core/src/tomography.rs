//! Possibilistic stabilizer tomography of `(I ⊗ C_L ⋯ C_1)|Φ⟩` through a
//! `CliffP(Q)_L` oracle.
//!
//! Each magic-square line is measured with one oracle query in a rotated Bell
//! basis. Rows multiply to `-I` and columns to `+I`, so the six eigenvalue
//! triples can never agree on all nine entries, and any entry where the row
//! and column readings disagree cannot be a stabilizer.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::LazyLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{expectation, rotation_equivalence, BellBasisRotation};
use crate::circuits::PCliffInstance;
use crate::error::{Error, Result};
use crate::group::{Clifford1, PauliLabel, SignedPauli2, CLIFFORD_ORDER};
use crate::oracle::PcliffOracle;

use PauliLabel::{X, Y, Z};

/// Oracle queries made by [`learn_nonstabilizer`].
pub const QUERIES_PER_NONSTABILIZER: usize = 6;

const SQUARE: [[(PauliLabel, PauliLabel); 3]; 3] = [
    [(X, X), (Y, Y), (Z, Z)],
    [(Y, Z), (Z, X), (X, Y)],
    [(Z, Y), (X, Z), (Y, X)],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MagicSquare {
    pub entries: [[SignedPauli2; 3]; 3],
}

pub fn magic_square() -> MagicSquare {
    MagicSquare {
        entries: SQUARE.map(|row| row.map(|(a, b)| SignedPauli2::unsigned(a, b))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Line {
    Row(usize),
    Col(usize),
}

impl Line {
    pub const ALL: [Line; 6] = [
        Line::Row(0),
        Line::Row(1),
        Line::Row(2),
        Line::Col(0),
        Line::Col(1),
        Line::Col(2),
    ];

    /// Grid positions `(row, col)` along the line.
    pub fn cells(self) -> [(usize, usize); 3] {
        match self {
            Line::Row(r) => [(r, 0), (r, 1), (r, 2)],
            Line::Col(c) => [(0, c), (1, c), (2, c)],
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(r) => write!(f, "row{}", r + 1),
            Line::Col(c) => write!(f, "col{}", c + 1),
        }
    }
}

impl MagicSquare {
    pub fn line(&self, line: Line) -> [SignedPauli2; 3] {
        line.cells().map(|(r, c)| self.entries[r][c])
    }

    pub fn line_product(&self, line: Line) -> SignedPauli2 {
        let [a, b, c] = self.line(line);
        a * b * c
    }
}

/// Whether some `±1` assignment to the nine cells has every row product `-1`
/// and every column product `+1`.
pub fn sign_assignment_exists() -> bool {
    (0u32..1 << 9).any(|bits| {
        let v = |r: usize, c: usize| if bits >> (3 * r + c) & 1 == 1 { -1i32 } else { 1 };
        (0..3).all(|r| v(r, 0) * v(r, 1) * v(r, 2) == -1) && (0..3).all(|c| v(0, c) * v(1, c) * v(2, c) == 1)
    })
}

/// How to measure one line with a single rotated Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSetting {
    pub line: Line,
    pub rotation: BellBasisRotation,
}

fn rotated_pair(d_a: Clifford1, d_b: Clifford1, p: PauliLabel) -> SignedPauli2 {
    SignedPauli2::tensor(d_a.conjugate_label(p), d_b.conjugate_label(p))
}

fn unsigned_set(ops: impl IntoIterator<Item = SignedPauli2>) -> BTreeSet<SignedPauli2> {
    ops.into_iter().map(|p| p.unsigned_part()).collect()
}

/// The operators `X′⊗X′`, `Z′⊗Z′` and their product measured by a rotation.
pub fn measured_operators(rot: &BellBasisRotation) -> [SignedPauli2; 3] {
    let xx = rotated_pair(rot.d_a, rot.d_b, X);
    let zz = rotated_pair(rot.d_a, rot.d_b, Z);
    [xx, zz, xx * zz]
}

static LINE_SETTINGS: LazyLock<[LineSetting; 6]> = LazyLock::new(|| {
    let square = magic_square();
    Line::ALL.map(|line| {
        let want = unsigned_set(square.line(line));
        (0..CLIFFORD_ORDER * CLIFFORD_ORDER)
            .map(|i| {
                BellBasisRotation::new(
                    Clifford1::from_code((i / CLIFFORD_ORDER) as u8).expect("< 24"),
                    Clifford1::from_code((i % CLIFFORD_ORDER) as u8).expect("< 24"),
                )
            })
            .find(|rot| unsigned_set(measured_operators(rot)) == want)
            .map(|rotation| LineSetting { line, rotation })
            .expect("every magic-square line is a rotated Bell basis")
    })
});

/// First `(D_A, D_B)` in code order whose rotated Bell basis diagonalizes
/// the line.
pub fn line_setting(line: Line) -> LineSetting {
    let idx = Line::ALL.iter().position(|&l| l == line).expect("line in ALL");
    LINE_SETTINGS[idx]
}

/// Eigenvalues of the line's three entries after observing `outcome` from a
/// measurement with `setting.rotation.d`.
pub fn line_eigenvalues(setting: &LineSetting, outcome: PauliLabel) -> [i8; 3] {
    let rot = &setting.rotation;
    let state = rot.basis_state(rotation_equivalence(rot, outcome));
    magic_square().line(setting.line).map(|e| expectation(&state, e))
}

/// Row readings `m` and column readings `m′` from one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonstabilizerRun {
    pub result: SignedPauli2,
    pub cell: (usize, usize),
    pub row_values: [[i8; 3]; 3],
    pub col_values: [[i8; 3]; 3],
    pub queries: usize,
}

pub fn learn_nonstabilizer_run(oracle: &dyn PcliffOracle, cliffords: &[Clifford1]) -> Result<NonstabilizerRun> {
    let mut rows = [[0i8; 3]; 3];
    let mut cols = [[0i8; 3]; 3];
    for setting in LINE_SETTINGS.iter() {
        let inst = PCliffInstance::new(cliffords.to_vec(), setting.rotation.d)?;
        let answer = oracle.query(&inst)?;
        let values = line_eigenvalues(setting, answer);
        for ((r, c), v) in setting.line.cells().into_iter().zip(values) {
            match setting.line {
                Line::Row(_) => rows[r][c] = v,
                Line::Col(_) => cols[r][c] = v,
            }
        }
    }
    let square = magic_square();
    let cell = (0..9)
        .map(|i| (i / 3, i % 3))
        .find(|&(r, c)| rows[r][c] != cols[r][c])
        .expect("row and column readings cannot agree on all nine cells");
    Ok(NonstabilizerRun {
        result: square.entries[cell.0][cell.1],
        cell,
        row_values: rows,
        col_values: cols,
        queries: QUERIES_PER_NONSTABILIZER,
    })
}

/// An unsigned weight-2 Pauli with expectation 0 in `(I ⊗ C_L ⋯ C_1)|Φ⟩`.
pub fn learn_nonstabilizer(oracle: &dyn PcliffOracle, cliffords: &[Clifford1]) -> Result<SignedPauli2> {
    Ok(learn_nonstabilizer_run(oracle, cliffords)?.result)
}

fn random_clifford<R: Rng + ?Sized>(rng: &mut R) -> Clifford1 {
    Clifford1::from_code(rng.random_range(0..CLIFFORD_ORDER as u8)).expect("< 24")
}

fn conj_right(c: Clifford1, p: SignedPauli2) -> SignedPauli2 {
    SignedPauli2::tensor(p.left().into(), c.conjugate_label(p.right())).unsigned_part()
}

fn conj_left(c: Clifford1, p: SignedPauli2) -> SignedPauli2 {
    SignedPauli2::tensor(c.conjugate_label(p.left()), p.right().into()).unsigned_part()
}

/// Re-randomize the sequence to a uniform one with product `D_L · ∏C`, learn
/// a non-stabilizer of that, and undo `D_L` on the right qubit.
pub fn kilian_wrap<R: Rng + ?Sized>(
    oracle: &dyn PcliffOracle,
    cliffords: &[Clifford1],
    rng: &mut R,
) -> Result<SignedPauli2> {
    if cliffords.is_empty() {
        return Err(Error::InvalidInput("need at least one clifford".into()));
    }
    let ds: Vec<Clifford1> = cliffords.iter().map(|_| random_clifford(rng)).collect();
    let wrapped: Vec<Clifford1> = cliffords
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let left = ds[j].compose(c);
            if j == 0 {
                left
            } else {
                left.compose(ds[j - 1].inverse())
            }
        })
        .collect();
    let m = learn_nonstabilizer(oracle, &wrapped)?;
    Ok(conj_right(ds[ds.len() - 1].inverse(), m))
}

/// Query with `C_1 V` for uniform `V` and undo `V^T` on the left qubit. The
/// net effect is conjugation by `V* ⊗ V`, which fixes `|Φ⟩` and moves the
/// learned operator uniformly over the six weight-2 non-stabilizers.
pub fn uniform_nonstabilizer<R: Rng + ?Sized>(
    oracle: &dyn PcliffOracle,
    cliffords: &[Clifford1],
    rng: &mut R,
) -> Result<SignedPauli2> {
    if cliffords.is_empty() {
        return Err(Error::InvalidInput("need at least one clifford".into()));
    }
    let v = random_clifford(rng);
    let mut shifted = cliffords.to_vec();
    shifted[0] = shifted[0].compose(v);
    let m = kilian_wrap(oracle, &shifted, rng)?;
    Ok(conj_left(v.transpose().inverse(), m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerPairResult {
    /// Two distinct unsigned weight-2 stabilizers, sorted.
    pub pair: [SignedPauli2; 2],
    /// Number of uniform non-stabilizer draws used.
    pub draws: usize,
}

/// Probability that `budget` uniform draws miss one of six items, bounded
/// by the union bound `6·(5/6)^budget`.
pub fn failure_bound(budget: usize) -> f64 {
    6.0 * (5.0f64 / 6.0).powi(budget as i32)
}

/// Collect the six weight-2 non-stabilizers and return two of the three
/// complementary weight-2 labels, which are the stabilizers up to sign.
pub fn learn_stabilizer_pair<R: Rng + ?Sized>(
    oracle: &dyn PcliffOracle,
    cliffords: &[Clifford1],
    budget: usize,
    rng: &mut R,
) -> Result<StabilizerPairResult> {
    if budget < 6 {
        return Err(Error::InvalidInput(format!("budget {budget} < 6 can never succeed")));
    }
    let mut seen = BTreeSet::new();
    for draw in 1..=budget {
        let m = uniform_nonstabilizer(oracle, cliffords, rng)?;
        if m.weight() != 2 {
            return Err(Error::ContractViolation(format!(
                "learned weight-{} operator {m}",
                m.weight()
            )));
        }
        seen.insert(m);
        if seen.len() == 6 {
            let stabs: Vec<SignedPauli2> = SignedPauli2::all_weight2().filter(|p| !seen.contains(p)).collect();
            return Ok(StabilizerPairResult {
                pair: [stabs[0], stabs[1]],
                draws: draw,
            });
        }
    }
    Err(Error::BudgetExhausted {
        budget,
        partial: seen.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{state_of, weight2_nonstabilizers, weight2_stabilizers};
    use crate::circuits::{pcliff_support, ConstantCorrection, CorrectionFn};
    use crate::group::product_of_sequence;
    use crate::oracle::{AdversarialPcliff, CountingPcliff, HonestPcliff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn honest() -> HonestPcliff {
        HonestPcliff::new(Arc::new(ConstantCorrection(PauliLabel::I)))
    }

    #[test]
    fn square_products() {
        let sq = magic_square();
        let minus = -SignedPauli2::IDENTITY;
        for r in 0..3 {
            assert_eq!(sq.line_product(Line::Row(r)), minus);
            assert_eq!(sq.line_product(Line::Col(r)), SignedPauli2::IDENTITY);
        }
        assert!(!sign_assignment_exists());
    }

    #[test]
    fn first_row_is_the_standard_basis() {
        let s = line_setting(Line::Row(0));
        assert_eq!(s.rotation.d_a, Clifford1::identity());
        assert_eq!(s.rotation.d_b, Clifford1::identity());
        assert_eq!(s.rotation.d, Clifford1::identity());
    }

    #[test]
    fn every_line_is_covered() {
        let sq = magic_square();
        for line in Line::ALL {
            let s = line_setting(line);
            assert!(s.rotation.is_consistent());
            assert_eq!(
                unsigned_set(measured_operators(&s.rotation)),
                unsigned_set(sq.line(line))
            );
        }
    }

    #[test]
    fn decoding_table() {
        // eigenvalue of X′X′ is +1 iff P′ ∈ {I, X}, of Z′Z′ iff P′ ∈ {I, Z}
        for line in Line::ALL {
            let s = line_setting(line);
            let [xx, zz, _] = measured_operators(&s.rotation);
            for p in PauliLabel::ALL {
                let pp = rotation_equivalence(&s.rotation, p);
                let state = s.rotation.basis_state(pp);
                let want_x = if matches!(pp, PauliLabel::I | PauliLabel::X) {
                    1
                } else {
                    -1
                };
                let want_z = if matches!(pp, PauliLabel::I | PauliLabel::Z) {
                    1
                } else {
                    -1
                };
                assert_eq!(expectation(&state, xx), want_x);
                assert_eq!(expectation(&state, zz), want_z);
                let [a, b, c] = line_eigenvalues(&s, p);
                assert_eq!(a * b * c, if matches!(line, Line::Row(_)) { -1 } else { 1 });
            }
        }
    }

    #[test]
    fn honest_identity_product() {
        let m = learn_nonstabilizer(&honest(), &[Clifford1::identity()]).unwrap();
        assert!(weight2_nonstabilizers(&state_of(Clifford1::identity())).contains(&m));
    }

    #[test]
    fn six_queries() {
        let o = CountingPcliff::new(AdversarialPcliff::new(5));
        learn_nonstabilizer(&o, &[Clifford1::hadamard(), Clifford1::phase_s()]).unwrap();
        assert_eq!(o.count(), 6);
    }

    /// Every answer table consistent with the support, for L = 1.
    #[test]
    fn any_support_consistent_answers_work_for_l1() {
        struct Table {
            q: ConstantCorrection,
            answers: [PauliLabel; 6],
        }
        impl PcliffOracle for Table {
            fn name(&self) -> String {
                "table".into()
            }
            fn query(&self, inst: &PCliffInstance) -> Result<PauliLabel> {
                let idx = LINE_SETTINGS.iter().position(|s| s.rotation.d == inst.d).unwrap();
                Ok(self.answers[idx])
            }
            fn correction(&self) -> Option<&dyn CorrectionFn> {
                Some(&self.q)
            }
        }
        let ds: BTreeSet<u8> = LINE_SETTINGS.iter().map(|s| s.rotation.d.code()).collect();
        assert_eq!(ds.len(), 6, "line settings use distinct D");
        for c in Clifford1::all() {
            for q in PauliLabel::ALL {
                let q = ConstantCorrection(q);
                let options: Vec<Vec<PauliLabel>> = LINE_SETTINGS
                    .iter()
                    .map(|s| {
                        let inst = PCliffInstance::new(vec![c], s.rotation.d).unwrap();
                        PauliLabel::ALL
                            .into_iter()
                            .filter(|&p| pcliff_support(&q, &inst, p))
                            .collect()
                    })
                    .collect();
                let total: usize = options.iter().map(Vec::len).product();
                for mut idx in 0..total {
                    let answers = std::array::from_fn(|i| {
                        let p = options[i][idx % options[i].len()];
                        idx /= options[i].len();
                        p
                    });
                    let m = learn_nonstabilizer(&Table { q, answers }, &[c]).unwrap();
                    assert_eq!(expectation(&state_of(c), m), 0);
                }
            }
        }
    }

    #[test]
    fn kilian_from_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = kilian_wrap(&honest(), &[Clifford1::identity()], &mut rng).unwrap();
            assert_eq!(expectation(&state_of(Clifford1::identity()), m), 0);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let o = AdversarialPcliff::new(4);
        let cl = [Clifford1::hadamard(), Clifford1::phase_s()];
        let a = kilian_wrap(&o, &cl, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = kilian_wrap(&o, &cl, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_draws_are_nonstabilizers_of_weight_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..30 {
            let o = AdversarialPcliff::new(seed);
            let cl: Vec<Clifford1> = (0..3).map(|_| random_clifford(&mut rng)).collect();
            let state = state_of(product_of_sequence(&cl));
            for _ in 0..10 {
                let m = uniform_nonstabilizer(&o, &cl, &mut rng).unwrap();
                assert_eq!(m.weight(), 2);
                assert_eq!(expectation(&state, m), 0);
            }
        }
    }

    #[test]
    fn stabilizer_pairs_for_even_and_odd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let even: BTreeSet<_> = ["XX", "YY", "ZZ"]
            .iter()
            .map(|s| SignedPauli2::parse(s).unwrap())
            .collect();
        let odd: BTreeSet<_> = ["XZ", "ZX", "YY"]
            .iter()
            .map(|s| SignedPauli2::parse(s).unwrap())
            .collect();
        for (c, want) in [(Clifford1::identity(), even), (Clifford1::hadamard(), odd)] {
            let r = learn_stabilizer_pair(&honest(), &[c], 64, &mut rng).unwrap();
            assert_ne!(r.pair[0], r.pair[1]);
            assert!(r.pair.iter().all(|p| want.contains(p)));
            assert!(r.draws >= 6);
            let stabs = weight2_stabilizers(&state_of(c));
            assert!(r.pair.iter().all(|p| stabs.contains(p)));
        }
    }

    #[test]
    fn small_budgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            learn_stabilizer_pair(&honest(), &[Clifford1::identity()], 5, &mut rng),
            Err(Error::InvalidInput(_))
        ));
        let mut exhausted = 0;
        for _ in 0..50 {
            match learn_stabilizer_pair(&AdversarialPcliff::new(0), &[Clifford1::identity()], 6, &mut rng) {
                Err(Error::BudgetExhausted { partial, .. }) => {
                    assert!(partial.len() < 6);
                    exhausted += 1;
                }
                Ok(_) => {}
                Err(e) => panic!("{e}"),
            }
        }
        // 6!/6^6 ≈ 1.5% success per run
        assert!(exhausted > 40);
        assert!((failure_bound(64) - 6.0 * (5.0f64 / 6.0).powi(64)).abs() < 1e-15);
    }
}
