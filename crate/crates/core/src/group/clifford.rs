//! The 24-element single-qubit Clifford group modulo global phase, held as a
//! conjugation tableau (images of `X` and `Z`).

use std::fmt;
use std::ops::Mul;
use std::sync::LazyLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{self, Mat2};
use super::pauli::{PauliLabel, SignedPauli1};
use super::s3::S3Perm;
use crate::error::{Error, Result};

pub const CLIFFORD_ORDER: usize = 24;
/// Number of cosets of the Pauli group, i.e. `|C/P|`.
pub const COSET_COUNT: usize = 6;

/// Names of the coset representatives `{I, H, S, HS, SHS, (HS)^2}` in code order.
pub const COSET_NAMES: [&str; COSET_COUNT] = ["I", "H", "S", "HS", "SHS", "(HS)^2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Clifford1 {
    x_image: SignedPauli1,
    z_image: SignedPauli1,
}

struct Table {
    elements: [Clifford1; CLIFFORD_ORDER],
    code_by_key: [u8; 64],
    product: [[u8; CLIFFORD_ORDER]; CLIFFORD_ORDER],
    inverse: [u8; CLIFFORD_ORDER],
}

const NO_CODE: u8 = u8::MAX;

fn image_key(p: SignedPauli1) -> u8 {
    u8::from(p.x_bit()) | (u8::from(p.z_bit()) << 1) | (u8::from(p.label_phase() == 2) << 2)
}

fn tableau_key(c: &Clifford1) -> usize {
    usize::from(image_key(c.x_image) | (image_key(c.z_image) << 3))
}

static TABLE: LazyLock<Table> = LazyLock::new(|| {
    let x = SignedPauli1::from_label(PauliLabel::X);
    let z = SignedPauli1::from_label(PauliLabel::Z);
    let y = SignedPauli1::from_label(PauliLabel::Y);
    let raw = |xi, zi| Clifford1 {
        x_image: xi,
        z_image: zi,
    };
    let id = raw(x, z);
    let h = raw(z, x);
    let s = raw(y, z);
    let hs = h.compose_raw(&s);
    let cosets = [id, h, s, hs, s.compose_raw(&hs), hs.compose_raw(&hs)];
    let paulis = [id, raw(x, -z), raw(-x, -z), raw(-x, z)];

    let mut elements = [id; CLIFFORD_ORDER];
    let mut code_by_key = [NO_CODE; 64];
    for (p, pauli) in paulis.iter().enumerate() {
        for (k, coset) in cosets.iter().enumerate() {
            let code = p * COSET_COUNT + k;
            let c = pauli.compose_raw(coset);
            elements[code] = c;
            let key = tableau_key(&c);
            assert_eq!(code_by_key[key], NO_CODE, "duplicate clifford tableau");
            code_by_key[key] = code as u8;
        }
    }
    let mut product = [[0u8; CLIFFORD_ORDER]; CLIFFORD_ORDER];
    let mut inverse = [0u8; CLIFFORD_ORDER];
    for a in 0..CLIFFORD_ORDER {
        for b in 0..CLIFFORD_ORDER {
            let c = elements[a].compose_raw(&elements[b]);
            let code = code_by_key[tableau_key(&c)];
            assert_ne!(code, NO_CODE, "clifford group not closed");
            product[a][b] = code;
            if code == 0 {
                inverse[a] = b as u8;
            }
        }
    }
    Table {
        elements,
        code_by_key,
        product,
        inverse,
    }
});

impl Clifford1 {
    /// Build from images of `X` and `Z`. Both must be Hermitian, non-identity
    /// and anticommute.
    pub fn from_images(x_image: SignedPauli1, z_image: SignedPauli1) -> Result<Self> {
        let valid = x_image.is_hermitian()
            && z_image.is_hermitian()
            && !x_image.is_identity_up_to_phase()
            && !z_image.is_identity_up_to_phase()
            && !x_image.commutes_with(z_image);
        if !valid {
            return Err(Error::InvalidInput(format!(
                "({x_image}, {z_image}) is not a valid clifford tableau"
            )));
        }
        Ok(Clifford1 { x_image, z_image })
    }

    pub fn identity() -> Self {
        TABLE.elements[0]
    }

    pub fn hadamard() -> Self {
        TABLE.elements[1]
    }

    pub fn phase_s() -> Self {
        TABLE.elements[2]
    }

    /// The Pauli operator `label` viewed as a Clifford.
    pub fn pauli(label: PauliLabel) -> Self {
        TABLE.elements[usize::from(label.code()) * COSET_COUNT]
    }

    /// Representative of coset `index` of `C/P` (see [`COSET_NAMES`]).
    pub fn coset_representative(index: usize) -> Result<Self> {
        if index >= COSET_COUNT {
            return Err(Error::IndexOutOfRange {
                what: "coset",
                index,
                len: COSET_COUNT,
            });
        }
        Ok(TABLE.elements[index])
    }

    /// All 24 elements in code order.
    pub fn all() -> impl Iterator<Item = Clifford1> {
        TABLE.elements.iter().copied()
    }

    /// Uniform over the 24 elements.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Clifford1 {
        TABLE.elements[rng.random_range(0..CLIFFORD_ORDER)]
    }

    pub fn image_of_x(self) -> SignedPauli1 {
        self.x_image
    }

    pub fn image_of_z(self) -> SignedPauli1 {
        self.z_image
    }

    /// `c · p · c†` with exact phase.
    pub fn conjugate(self, p: SignedPauli1) -> SignedPauli1 {
        let mut out = SignedPauli1::IDENTITY.times_phase(p.phase_exp());
        if p.x_bit() {
            out = out * self.x_image;
        }
        if p.z_bit() {
            out = out * self.z_image;
        }
        out
    }

    pub fn conjugate_label(self, p: PauliLabel) -> SignedPauli1 {
        self.conjugate(SignedPauli1::from_label(p))
    }

    fn compose_raw(&self, other: &Clifford1) -> Clifford1 {
        Clifford1 {
            x_image: self.conjugate(other.x_image),
            z_image: self.conjugate(other.z_image),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(self, other: Clifford1) -> Clifford1 {
        TABLE.elements[usize::from(TABLE.product[self.index()][other.index()])]
    }

    pub fn inverse(self) -> Clifford1 {
        TABLE.elements[usize::from(TABLE.inverse[self.index()])]
    }

    pub fn pow(self, k: u32) -> Clifford1 {
        (0..k).fold(Clifford1::identity(), |acc, _| acc.compose(self))
    }

    /// Tableau of the matrix transpose of any representative.
    ///
    /// `U^T = conj(U^{-1})`, and conjugation by a complex-conjugated unitary
    /// acts on Paulis as `P ↦ conj(U^{-1} · conj(P) · U)`.
    pub fn transpose(self) -> Clifford1 {
        let inv = self.inverse();
        let image = |p: PauliLabel| {
            inv.conjugate(SignedPauli1::from_label(p).complex_conjugate())
                .complex_conjugate()
        };
        Clifford1 {
            x_image: image(PauliLabel::X),
            z_image: image(PauliLabel::Z),
        }
    }

    fn index(self) -> usize {
        usize::from(TABLE.code_by_key[tableau_key(&self)])
    }

    /// 5-bit code `pauli_index · 6 + coset_index`.
    pub fn code(self) -> u8 {
        TABLE.code_by_key[tableau_key(&self)]
    }

    pub fn from_code(code: u8) -> Result<Self> {
        TABLE
            .elements
            .get(usize::from(code))
            .copied()
            .ok_or(Error::InvalidEncoding {
                what: "clifford",
                code: u32::from(code),
            })
    }

    /// `(P, k)` with `self = P · R_k` up to global phase.
    pub fn decomposition(self) -> (PauliLabel, usize) {
        let code = usize::from(self.code());
        let pauli = PauliLabel::from_code((code / COSET_COUNT) as u8).expect("code < 24");
        (pauli, code % COSET_COUNT)
    }

    pub fn coset_index(self) -> usize {
        self.decomposition().1
    }

    pub fn is_pauli(self) -> bool {
        self.coset_index() == 0
    }

    /// Image in `C/P ≅ S_3`: the permutation of the axes `X=1, Y=2, Z=3`
    /// induced by conjugation.
    pub fn quotient_s3(self) -> S3Perm {
        let mut images = [0u8; 3];
        for (slot, axis) in images.iter_mut().zip(PauliLabel::AXES) {
            *slot = self.conjugate_label(axis).label().code() - 1;
        }
        S3Perm::from_images(images).expect("conjugation permutes the axes")
    }

    /// A unitary representative: the Pauli matrix times the coset
    /// representative built from the standard `H` and `S` matrices.
    pub fn matrix(self) -> Mat2 {
        let (p, k) = self.decomposition();
        let h = matrix::hadamard();
        let s = matrix::phase_s();
        let hs = matrix::mul(&h, &s);
        let coset = match k {
            0 => matrix::identity(),
            1 => h,
            2 => s,
            3 => hs,
            4 => matrix::mul(&s, &hs),
            _ => matrix::mul(&hs, &hs),
        };
        matrix::mul(&pauli_matrix(p), &coset)
    }

    /// Short name such as `X·SHS`.
    pub fn name(self) -> String {
        let (p, k) = self.decomposition();
        match (p, k) {
            (PauliLabel::I, k) => COSET_NAMES[k].to_string(),
            (p, 0) => p.to_string(),
            (p, k) => format!("{p}·{}", COSET_NAMES[k]),
        }
    }
}

pub fn pauli_matrix(p: PauliLabel) -> Mat2 {
    match p {
        PauliLabel::I => matrix::identity(),
        PauliLabel::X => matrix::pauli_x(),
        PauliLabel::Y => matrix::pauli_y(),
        PauliLabel::Z => matrix::pauli_z(),
    }
}

/// Product `c_last · … · c_first` of a sequence applied first-to-last.
pub fn product_of_sequence(cliffords: &[Clifford1]) -> Clifford1 {
    cliffords.iter().fold(Clifford1::identity(), |acc, c| c.compose(acc))
}

impl Mul for Clifford1 {
    type Output = Clifford1;

    fn mul(self, rhs: Clifford1) -> Clifford1 {
        self.compose(rhs)
    }
}

impl Default for Clifford1 {
    fn default() -> Self {
        Clifford1::identity()
    }
}

impl From<Clifford1> for u8 {
    fn from(c: Clifford1) -> u8 {
        c.code()
    }
}

impl TryFrom<u8> for Clifford1 {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        Clifford1::from_code(code)
    }
}

impl fmt::Display for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn conj_matrix(u: &Mat2, p: PauliLabel) -> Mat2 {
        matrix::mul(&matrix::mul(u, &pauli_matrix(p)), &matrix::adjoint(u))
    }

    fn signed_matrix(p: SignedPauli1) -> Mat2 {
        let phase = Complex64::i().powu(u32::from(p.label_phase()));
        matrix::scale(&pauli_matrix(p.label()), phase)
    }

    #[test]
    fn exactly_24_distinct_elements() {
        let all: Vec<_> = Clifford1::all().collect();
        assert_eq!(all.len(), 24);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(usize::from(a.code()), i);
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn hadamard_is_an_involution() {
        let h = Clifford1::hadamard();
        assert_eq!(h.compose(h), Clifford1::identity());
        assert_eq!(h.inverse(), h);
    }

    #[test]
    fn sh_has_order_three_mod_paulis() {
        let sh = Clifford1::phase_s().compose(Clifford1::hadamard());
        assert!(!sh.is_pauli());
        assert!(!sh.pow(2).is_pauli());
        assert!(sh.pow(3).is_pauli());
    }

    #[test]
    fn inverse_of_s_sends_x_to_minus_y() {
        let sinv = Clifford1::phase_s().inverse();
        assert_eq!(sinv.image_of_x(), -SignedPauli1::from_label(PauliLabel::Y));
        assert_eq!(sinv.image_of_z(), SignedPauli1::from_label(PauliLabel::Z));
        // matrix oracle
        let m = matrix::adjoint(&matrix::phase_s());
        assert!(matrix::max_abs_diff(&conj_matrix(&m, PauliLabel::X), &signed_matrix(sinv.image_of_x())) < 1e-12);
    }

    #[test]
    fn conjugation_examples() {
        let x = PauliLabel::X;
        let z = PauliLabel::Z;
        let y = SignedPauli1::from_label(PauliLabel::Y);
        assert_eq!(Clifford1::hadamard().conjugate_label(x), SignedPauli1::from_label(z));
        assert_eq!(Clifford1::phase_s().conjugate_label(x), y);
        let sh = Clifford1::phase_s() * Clifford1::hadamard();
        assert_eq!(sh.conjugate_label(x), SignedPauli1::from_label(z));
        assert_eq!(sh.conjugate_label(z), y);
        assert_eq!(sh.conjugate_label(PauliLabel::Y), SignedPauli1::from_label(x));
    }

    #[test]
    fn tableau_matches_matrix_conjugation() {
        for c in Clifford1::all() {
            let u = c.matrix();
            for (p, img) in [(PauliLabel::X, c.image_of_x()), (PauliLabel::Z, c.image_of_z())] {
                assert!(
                    matrix::max_abs_diff(&conj_matrix(&u, p), &signed_matrix(img)) < 1e-12,
                    "{c}"
                );
            }
        }
    }

    #[test]
    fn transpose_matches_matrix_transpose() {
        for c in Clifford1::all() {
            let t = c.transpose();
            let ut = matrix::transpose(&c.matrix());
            assert!(
                matrix::proportionality(&ut, &t.matrix(), 1e-9).is_some(),
                "transpose of {c}"
            );
        }
        assert_eq!(Clifford1::identity().transpose(), Clifford1::identity());
        assert_eq!(Clifford1::hadamard().transpose(), Clifford1::hadamard());
        assert_eq!(Clifford1::phase_s().transpose(), Clifford1::phase_s());
    }

    #[test]
    fn codes() {
        assert_eq!(Clifford1::identity().code(), 0);
        assert!(matches!(Clifford1::from_code(24), Err(Error::InvalidEncoding { .. })));
        for c in Clifford1::all() {
            assert_eq!(Clifford1::from_code(c.code()).unwrap(), c);
        }
    }

    #[test]
    fn canonical_decomposition_examples() {
        assert_eq!(Clifford1::identity().decomposition(), (PauliLabel::I, 0));
        assert_eq!(Clifford1::hadamard().decomposition(), (PauliLabel::I, 1));
        let xs = Clifford1::pauli(PauliLabel::X) * Clifford1::phase_s();
        assert_eq!(xs.decomposition(), (PauliLabel::X, 2));
    }

    #[test]
    fn decomposition_reassembles() {
        for c in Clifford1::all() {
            let (p, k) = c.decomposition();
            let r = Clifford1::coset_representative(k).unwrap();
            assert_eq!(Clifford1::pauli(p) * r, c);
        }
    }

    #[test]
    fn quotient_table() {
        let h = Clifford1::hadamard();
        let s = Clifford1::phase_s();
        assert_eq!(h.quotient_s3().to_string(), "(13)");
        assert_eq!(s.quotient_s3().to_string(), "(12)");
        assert_eq!((h * s).quotient_s3().to_string(), "(123)");
        assert_eq!((s * h * s).quotient_s3().to_string(), "(23)");
        assert_eq!((h * s * h * s).quotient_s3().to_string(), "(132)");
        assert!(Clifford1::identity().quotient_s3().is_identity());
    }

    #[test]
    fn rejects_invalid_tableau() {
        let x = SignedPauli1::from_label(PauliLabel::X);
        assert!(Clifford1::from_images(x, x).is_err());
        assert!(Clifford1::from_images(x, SignedPauli1::IDENTITY).is_err());
        assert!(Clifford1::from_images(x.times_phase(1), SignedPauli1::from_label(PauliLabel::Z)).is_err());
    }
}
