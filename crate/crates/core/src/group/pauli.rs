//! Single- and two-qubit Pauli operators with exact phase tracking.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unsigned single-qubit Pauli label. The 2-bit code is `I=0, X=1, Y=2, Z=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];
    /// The three non-identity labels, in axis order.
    pub const AXES: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(PauliLabel::I),
            1 => Ok(PauliLabel::X),
            2 => Ok(PauliLabel::Y),
            3 => Ok(PauliLabel::Z),
            _ => Err(Error::InvalidEncoding {
                what: "pauli",
                code: u32::from(code),
            }),
        }
    }

    /// Symplectic bits `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLabel::I => (false, false),
            PauliLabel::X => (true, false),
            PauliLabel::Y => (true, true),
            PauliLabel::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLabel::I,
            (true, false) => PauliLabel::X,
            (true, true) => PauliLabel::Y,
            (false, true) => PauliLabel::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliLabel::I => 'I',
            PauliLabel::X => 'X',
            PauliLabel::Y => 'Y',
            PauliLabel::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliLabel::I),
            'X' => Ok(PauliLabel::X),
            'Y' => Ok(PauliLabel::Y),
            'Z' => Ok(PauliLabel::Z),
            _ => Err(Error::InvalidInput(format!("unknown pauli symbol {c:?}"))),
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliLabel::I
    }

    pub fn commutes_with(self, other: PauliLabel) -> bool {
        self == PauliLabel::I || other == PauliLabel::I || self == other
    }

    /// Product with phases discarded.
    pub fn times(self, other: PauliLabel) -> PauliLabel {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        PauliLabel::from_bits(x1 ^ x2, z1 ^ z2)
    }
}

impl From<PauliLabel> for u8 {
    fn from(p: PauliLabel) -> u8 {
        p.code()
    }
}

impl TryFrom<u8> for PauliLabel {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        PauliLabel::from_code(code)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A single-qubit Pauli group element `i^phase · X^x · Z^z`.
///
/// The `(x, z, phase mod 4)` triple is a bijection onto the 16 elements of
/// the Pauli group, so equality of values is equality of operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedPauli1 {
    x: bool,
    z: bool,
    phase: u8,
}

impl SignedPauli1 {
    pub const IDENTITY: SignedPauli1 = SignedPauli1::new(false, false, 0);

    pub const fn new(x: bool, z: bool, phase: u8) -> Self {
        SignedPauli1 { x, z, phase: phase & 3 }
    }

    /// The Hermitian operator named by `label`, with sign `+1` (`Y = iXZ`).
    pub fn from_label(label: PauliLabel) -> Self {
        let (x, z) = label.bits();
        SignedPauli1::new(x, z, u8::from(x && z))
    }

    pub fn x_bit(self) -> bool {
        self.x
    }

    pub fn z_bit(self) -> bool {
        self.z
    }

    /// Exponent of `i` in front of `X^x Z^z`.
    pub fn phase_exp(self) -> u8 {
        self.phase
    }

    pub fn label(self) -> PauliLabel {
        PauliLabel::from_bits(self.x, self.z)
    }

    /// Exponent of `i` in front of the Hermitian label, i.e. `self = i^k · label`.
    pub fn label_phase(self) -> u8 {
        (self.phase + 4 - u8::from(self.x && self.z)) & 3
    }

    pub fn is_hermitian(self) -> bool {
        self.label_phase().is_multiple_of(2)
    }

    /// `+1` or `-1` for Hermitian operators, `None` otherwise.
    pub fn sign(self) -> Option<i8> {
        match self.label_phase() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_identity_up_to_phase(self) -> bool {
        !self.x && !self.z
    }

    pub fn commutes_with(self, other: SignedPauli1) -> bool {
        !((self.x && other.z) ^ (self.z && other.x))
    }

    /// Multiply by `i^k`.
    pub fn times_phase(self, k: u8) -> Self {
        SignedPauli1::new(self.x, self.z, self.phase + k)
    }

    pub fn adjoint(self) -> Self {
        // (i^a X^x Z^z)^† = i^{-a} Z^z X^x = i^{-a} (-1)^{xz} X^x Z^z
        SignedPauli1::new(self.x, self.z, 4 - self.phase + 2 * u8::from(self.x && self.z))
    }

    /// Entrywise complex conjugate of the matrix. `X` and `Z` are real.
    pub fn complex_conjugate(self) -> Self {
        SignedPauli1::new(self.x, self.z, 4 - self.phase)
    }
}

impl Mul for SignedPauli1 {
    type Output = SignedPauli1;

    fn mul(self, rhs: SignedPauli1) -> SignedPauli1 {
        // Z^z1 X^x2 = (-1)^{z1 x2} X^x2 Z^z1
        let swap = if self.z && rhs.x { 2 } else { 0 };
        SignedPauli1::new(self.x ^ rhs.x, self.z ^ rhs.z, self.phase + rhs.phase + swap)
    }
}

impl Neg for SignedPauli1 {
    type Output = SignedPauli1;

    fn neg(self) -> SignedPauli1 {
        self.times_phase(2)
    }
}

impl From<PauliLabel> for SignedPauli1 {
    fn from(label: PauliLabel) -> Self {
        SignedPauli1::from_label(label)
    }
}

fn phase_prefix(k: u8) -> &'static str {
    match k & 3 {
        0 => "+",
        1 => "+i",
        2 => "-",
        _ => "-i",
    }
}

impl fmt::Display for SignedPauli1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", phase_prefix(self.label_phase()), self.label())
    }
}

/// A two-qubit Pauli operator `i^phase · (left ⊗ right)` where `left` and
/// `right` are the Hermitian single-qubit labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SignedPauli2 {
    left: PauliLabel,
    right: PauliLabel,
    phase: u8,
}

impl SignedPauli2 {
    pub const IDENTITY: SignedPauli2 = SignedPauli2::unsigned(PauliLabel::I, PauliLabel::I);

    pub const fn new(left: PauliLabel, right: PauliLabel, phase: u8) -> Self {
        SignedPauli2 {
            left,
            right,
            phase: phase & 3,
        }
    }

    pub const fn unsigned(left: PauliLabel, right: PauliLabel) -> Self {
        SignedPauli2::new(left, right, 0)
    }

    pub fn tensor(a: SignedPauli1, b: SignedPauli1) -> Self {
        SignedPauli2::new(a.label(), b.label(), a.label_phase() + b.label_phase())
    }

    pub fn left(self) -> PauliLabel {
        self.left
    }

    pub fn right(self) -> PauliLabel {
        self.right
    }

    pub fn phase_exp(self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn sign(self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Drop the phase.
    pub fn unsigned_part(self) -> Self {
        SignedPauli2::unsigned(self.left, self.right)
    }

    pub fn weight(self) -> usize {
        usize::from(!self.left.is_identity()) + usize::from(!self.right.is_identity())
    }

    pub fn commutes_with(self, other: SignedPauli2) -> bool {
        let anti =
            usize::from(!self.left.commutes_with(other.left)) + usize::from(!self.right.commutes_with(other.right));
        anti % 2 == 0
    }

    /// Two-letter ASCII name such as `XZ`, phase dropped.
    pub fn name(self) -> String {
        format!("{}{}", self.left.symbol(), self.right.symbol())
    }

    /// Parse `XZ`, `+XZ`, `-XZ`, `iXZ` or `-iXZ`.
    pub fn parse(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let rest: Vec<char> = rest.chars().filter(|c| *c != '⊗').collect();
        if rest.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "two-qubit pauli must have two factors, got {s:?}"
            )));
        }
        Ok(SignedPauli2::new(
            PauliLabel::from_symbol(rest[0])?,
            PauliLabel::from_symbol(rest[1])?,
            phase,
        ))
    }

    /// All 16 unsigned two-qubit labels in `(left, right)` code order.
    pub fn all_unsigned() -> impl Iterator<Item = SignedPauli2> {
        PauliLabel::ALL
            .into_iter()
            .flat_map(|a| PauliLabel::ALL.into_iter().map(move |b| SignedPauli2::unsigned(a, b)))
    }

    /// The nine unsigned labels with both factors non-identity.
    pub fn all_weight2() -> impl Iterator<Item = SignedPauli2> {
        PauliLabel::AXES
            .into_iter()
            .flat_map(|a| PauliLabel::AXES.into_iter().map(move |b| SignedPauli2::unsigned(a, b)))
    }
}

impl Mul for SignedPauli2 {
    type Output = SignedPauli2;

    fn mul(self, rhs: SignedPauli2) -> SignedPauli2 {
        let l = SignedPauli1::from_label(self.left) * SignedPauli1::from_label(rhs.left);
        let r = SignedPauli1::from_label(self.right) * SignedPauli1::from_label(rhs.right);
        SignedPauli2::new(
            l.label(),
            r.label(),
            self.phase + rhs.phase + l.label_phase() + r.label_phase(),
        )
    }
}

impl Neg for SignedPauli2 {
    type Output = SignedPauli2;

    fn neg(self) -> SignedPauli2 {
        SignedPauli2::new(self.left, self.right, self.phase + 2)
    }
}

impl From<SignedPauli2> for String {
    fn from(p: SignedPauli2) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for SignedPauli2 {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        SignedPauli2::parse(&s)
    }
}

impl fmt::Display for SignedPauli2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", phase_prefix(self.phase), self.left, self.right)
    }
}
