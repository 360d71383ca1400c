//! Two-qubit stabilizer states of the form `(A ⊗ B)|Φ⟩` and rotated Bell bases.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Clifford1, PauliLabel, SignedPauli1, SignedPauli2};

/// Two commuting, independent generators of a two-qubit stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StabilizerPair {
    pub gen1: SignedPauli2,
    pub gen2: SignedPauli2,
}

fn conj_factor(c: Clifford1, p: PauliLabel) -> SignedPauli1 {
    c.conjugate_label(p)
}

fn conj_left(c: Clifford1, p: SignedPauli2) -> SignedPauli2 {
    let l = conj_factor(c, p.left());
    SignedPauli2::new(l.label(), p.right(), p.phase_exp() + l.label_phase())
}

fn conj_right(c: Clifford1, p: SignedPauli2) -> SignedPauli2 {
    let r = conj_factor(c, p.right());
    SignedPauli2::new(p.left(), r.label(), p.phase_exp() + r.label_phase())
}

impl StabilizerPair {
    pub fn new(gen1: SignedPauli2, gen2: SignedPauli2) -> Result<Self> {
        let ok = gen1.is_hermitian()
            && gen2.is_hermitian()
            && gen1.commutes_with(gen2)
            && gen1.weight() > 0
            && gen2.weight() > 0
            && gen1.unsigned_part() != gen2.unsigned_part();
        if !ok {
            return Err(Error::InvalidInput(format!(
                "{gen1}, {gen2} do not generate a two-qubit stabilizer state"
            )));
        }
        Ok(StabilizerPair { gen1, gen2 })
    }

    /// `|Φ⟩ = (|00⟩ + |11⟩)/√2`, stabilized by `XX` and `ZZ`.
    pub fn bell() -> Self {
        StabilizerPair {
            gen1: SignedPauli2::unsigned(PauliLabel::X, PauliLabel::X),
            gen2: SignedPauli2::unsigned(PauliLabel::Z, PauliLabel::Z),
        }
    }

    /// The four signed elements `{I, g1, g2, g1·g2}`.
    pub fn group(&self) -> [SignedPauli2; 4] {
        [SignedPauli2::IDENTITY, self.gen1, self.gen2, self.gen1 * self.gen2]
    }

    /// State after applying `c` to the left qubit.
    pub fn apply_left(&self, c: Clifford1) -> Self {
        StabilizerPair {
            gen1: conj_left(c, self.gen1),
            gen2: conj_left(c, self.gen2),
        }
    }

    /// State after applying `c` to the right qubit.
    pub fn apply_right(&self, c: Clifford1) -> Self {
        StabilizerPair {
            gen1: conj_right(c, self.gen1),
            gen2: conj_right(c, self.gen2),
        }
    }

    /// Whether both pairs generate the same signed group, i.e. the same state.
    pub fn same_state(&self, other: &StabilizerPair) -> bool {
        let a: BTreeSet<_> = self.group().into_iter().collect();
        let b: BTreeSet<_> = other.group().into_iter().collect();
        a == b
    }

    /// The three unsigned non-identity elements of the group.
    pub fn unsigned_stabilizers(&self) -> BTreeSet<SignedPauli2> {
        self.group()[1..].iter().map(|p| p.unsigned_part()).collect()
    }
}

impl fmt::Display for StabilizerPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.gen1, self.gen2)
    }
}

/// `(I ⊗ c)|Φ⟩`, generated by `X ⊗ cXc†` and `Z ⊗ cZc†`.
pub fn state_of(c: Clifford1) -> StabilizerPair {
    StabilizerPair::bell().apply_right(c)
}

/// `⟨ψ|obs|ψ⟩ ∈ {-1, 0, 1}` for a Hermitian observable.
pub fn expectation(state: &StabilizerPair, obs: SignedPauli2) -> i8 {
    assert!(obs.is_hermitian(), "expectation of non-Hermitian {obs}");
    if !obs.commutes_with(state.gen1) || !obs.commutes_with(state.gen2) {
        return 0;
    }
    // Two independent generators on two qubits form a maximal group, so a
    // commuting observable is ± one of its elements.
    let target = obs.unsigned_part();
    let member = state
        .group()
        .into_iter()
        .find(|g| g.unsigned_part() == target)
        .expect("maximal stabilizer group contains every commuting pauli up to sign");
    if member == obs {
        1
    } else {
        -1
    }
}

/// The weight-2 labels with expectation 0, in sorted order.
pub fn weight2_nonstabilizers(state: &StabilizerPair) -> Vec<SignedPauli2> {
    SignedPauli2::all_weight2()
        .filter(|&p| expectation(state, p) == 0)
        .collect()
}

/// The weight-2 labels with expectation ±1, in sorted order.
pub fn weight2_stabilizers(state: &StabilizerPair) -> Vec<SignedPauli2> {
    SignedPauli2::all_weight2()
        .filter(|&p| expectation(state, p) != 0)
        .collect()
}

/// A rotated Bell basis `(D_A ⊗ D_B)·{(I⊗P)|Φ⟩}` and the single-qubit
/// `D = (D_B·D_A^T)†` that realizes it as `(I ⊗ D†)·{(I⊗P)|Φ⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellBasisRotation {
    pub d_a: Clifford1,
    pub d_b: Clifford1,
    pub d: Clifford1,
}

impl BellBasisRotation {
    pub fn new(d_a: Clifford1, d_b: Clifford1) -> Self {
        BellBasisRotation {
            d_a,
            d_b,
            d: d_b.compose(d_a.transpose()).inverse(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        *self == BellBasisRotation::new(self.d_a, self.d_b)
    }

    /// State labelled by `p_prime` in the `(D_A ⊗ D_B)` basis.
    pub fn basis_state(&self, p_prime: PauliLabel) -> StabilizerPair {
        state_of(Clifford1::pauli(p_prime))
            .apply_left(self.d_a)
            .apply_right(self.d_b)
    }
}

/// Relabel a Bell outcome `P` measured in `(I ⊗ D†)·Bell` as the outcome
/// `P′` of the same event in the `(D_A ⊗ D_B)·Bell` basis.
pub fn rotation_equivalence(rot: &BellBasisRotation, bell_outcome: PauliLabel) -> PauliLabel {
    rot.d_a.transpose().conjugate_label(bell_outcome).label()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::clifford::pauli_matrix;
    use crate::group::matrix::{self, Mat2};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn p2(s: &str) -> SignedPauli2 {
        SignedPauli2::parse(s).unwrap()
    }

    type Vec4 = [Complex64; 4];

    /// `(A ⊗ B)|Φ⟩` as amplitudes over `|ab⟩`.
    fn bell_vector(a: &Mat2, b: &Mat2) -> Vec4 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = [Complex64::new(0.0, 0.0); 4];
        for i in 0..2 {
            for j in 0..2 {
                // Φ = Σ_k |kk⟩/√2
                v[2 * i + j] = (a[i][0] * b[j][0] + a[i][1] * b[j][1]) * h;
            }
        }
        v
    }

    fn expectation_vec(v: &Vec4, obs: SignedPauli2) -> f64 {
        let a = pauli_matrix(obs.left());
        let b = pauli_matrix(obs.right());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += v[2 * i + j].conj() * a[i][k] * b[j][l] * v[2 * k + l];
                    }
                }
            }
        }
        let sign = if obs.phase_exp() == 2 { -1.0 } else { 1.0 };
        sign * acc.re
    }

    #[test]
    fn state_of_examples() {
        let s = state_of(Clifford1::identity());
        assert_eq!((s.gen1, s.gen2), (p2("XX"), p2("ZZ")));
        let s = state_of(Clifford1::hadamard());
        assert_eq!((s.gen1, s.gen2), (p2("XZ"), p2("ZX")));
        let s = state_of(Clifford1::phase_s());
        assert_eq!((s.gen1, s.gen2), (p2("XY"), p2("ZZ")));
    }

    #[test]
    fn expectation_examples() {
        let phi = state_of(Clifford1::identity());
        assert_eq!(expectation(&phi, p2("XX")), 1);
        assert_eq!(expectation(&phi, p2("YY")), -1);
        assert_eq!(expectation(&phi, p2("-YY")), 1);
        assert_eq!(expectation(&phi, p2("XI")), 0);
    }

    #[test]
    fn expectation_matches_statevector() {
        for c in Clifford1::all() {
            let v = bell_vector(&matrix::identity(), &c.matrix());
            let st = state_of(c);
            for obs in SignedPauli2::all_unsigned() {
                let exact = f64::from(expectation(&st, obs));
                assert!((expectation_vec(&v, obs) - exact).abs() < 1e-9, "{c} {obs}");
            }
        }
    }

    #[test]
    fn nonstabilizers_of_phi() {
        let got: Vec<String> = weight2_nonstabilizers(&StabilizerPair::bell())
            .iter()
            .map(|p| p.name())
            .collect();
        assert_eq!(got, ["XY", "XZ", "YX", "YZ", "ZX", "ZY"]);
    }

    #[test]
    fn hadamard_stabilizers_are_the_odd_set() {
        let got: BTreeSet<_> = weight2_stabilizers(&state_of(Clifford1::hadamard()))
            .into_iter()
            .collect();
        let want: BTreeSet<_> = ["XZ", "ZX", "YY"].iter().map(|s| p2(s)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sixteen_labels_partition() {
        for c in Clifford1::all() {
            let st = state_of(c);
            let mut stab2 = 0;
            let mut non2 = 0;
            let mut non1 = 0;
            for p in SignedPauli2::all_unsigned() {
                match (p.weight(), expectation(&st, p)) {
                    (0, 1) => {}
                    (2, 0) => non2 += 1,
                    (2, _) => stab2 += 1,
                    (1, 0) => non1 += 1,
                    other => panic!("unexpected {other:?} for {p}"),
                }
            }
            assert_eq!((stab2, non2, non1), (3, 6, 6));
            assert_eq!(
                st.unsigned_stabilizers(),
                weight2_stabilizers(&st).into_iter().collect()
            );
        }
    }

    #[test]
    fn transpose_moves_across_phi() {
        for c in Clifford1::all() {
            let right = state_of(c);
            let left = StabilizerPair::bell().apply_left(c.transpose());
            assert!(right.same_state(&left), "{c}");
            let vr = bell_vector(&matrix::identity(), &c.matrix());
            let vl = bell_vector(&matrix::transpose(&c.matrix()), &matrix::identity());
            for p in PauliLabel::ALL {
                // Bell-measurement statistics on both vectors coincide.
                let basis = bell_vector(&matrix::identity(), &pauli_matrix(p));
                let amp = |v: &Vec4| (0..4).map(|i| basis[i].conj() * v[i]).sum::<Complex64>().norm_sqr();
                assert!((amp(&vr) - amp(&vl)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let id = BellBasisRotation::new(Clifford1::identity(), Clifford1::identity());
        assert_eq!(id.d, Clifford1::identity());
        assert_eq!(rotation_equivalence(&id, PauliLabel::X), PauliLabel::X);
        let h = BellBasisRotation::new(Clifford1::hadamard(), Clifford1::identity());
        assert_eq!(rotation_equivalence(&h, PauliLabel::X), PauliLabel::Z);
    }

    #[test]
    fn rotation_relabels_the_same_state() {
        for d_a in Clifford1::all() {
            for d_b in Clifford1::all() {
                let rot = BellBasisRotation::new(d_a, d_b);
                assert!(rot.is_consistent());
                for p in PauliLabel::ALL {
                    let direct = state_of(Clifford1::pauli(p)).apply_right(rot.d.inverse());
                    let relabelled = rot.basis_state(rotation_equivalence(&rot, p));
                    assert!(direct.same_state(&relabelled));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rotation_is_a_bijection(a in 0u8..24, b in 0u8..24) {
            let rot = BellBasisRotation::new(
                Clifford1::from_code(a).unwrap(),
                Clifford1::from_code(b).unwrap(),
            );
            let images: BTreeSet<_> = PauliLabel::ALL
                .into_iter()
                .map(|p| rotation_equivalence(&rot, p))
                .collect();
            prop_assert_eq!(images.len(), 4);
        }

        #[test]
        fn pauli_twists_only_flip_signs(c in 0u8..24, q in 0u8..4) {
            let c = Clifford1::from_code(c).unwrap();
            let q = Clifford1::pauli(PauliLabel::from_code(q).unwrap());
            let st = state_of(c);
            let twisted = st.apply_right(q);
            for obs in SignedPauli2::all_unsigned() {
                prop_assert_eq!(expectation(&st, obs).abs(), expectation(&twisted, obs).abs());
            }
        }
    }
}
