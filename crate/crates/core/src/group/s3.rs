//! The symmetric group on three symbols, written in cycle notation over `{1, 2, 3}`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A permutation of `{1, 2, 3}`, stored 0-based as the image of each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct S3Perm([u8; 3]);

impl S3Perm {
    pub const IDENTITY: S3Perm = S3Perm([0, 1, 2]);

    /// `images[i]` is the 0-based image of point `i`. Returns `None` unless
    /// the images are a permutation.
    pub fn from_images(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &v in &images {
            if v > 2 || seen[usize::from(v)] {
                return None;
            }
            seen[usize::from(v)] = true;
        }
        Some(S3Perm(images))
    }

    /// All six elements in lexicographic order of their image arrays.
    pub fn all() -> [S3Perm; 6] {
        [
            S3Perm([0, 1, 2]),
            S3Perm([0, 2, 1]),
            S3Perm([1, 0, 2]),
            S3Perm([1, 2, 0]),
            S3Perm([2, 0, 1]),
            S3Perm([2, 1, 0]),
        ]
    }

    pub fn images(self) -> [u8; 3] {
        self.0
    }

    pub fn apply(self, point: u8) -> u8 {
        self.0[usize::from(point)]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: S3Perm) -> S3Perm {
        S3Perm([
            self.0[usize::from(other.0[0])],
            self.0[usize::from(other.0[1])],
            self.0[usize::from(other.0[2])],
        ])
    }

    pub fn inverse(self) -> S3Perm {
        let mut inv = [0u8; 3];
        for (i, &v) in self.0.iter().enumerate() {
            inv[usize::from(v)] = i as u8;
        }
        S3Perm(inv)
    }

    pub fn is_identity(self) -> bool {
        self == S3Perm::IDENTITY
    }

    pub fn order(self) -> u32 {
        let mut p = self;
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for S3Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("()");
        }
        let mut visited = [false; 3];
        for start in 0..3u8 {
            if visited[usize::from(start)] || self.apply(start) == start {
                continue;
            }
            f.write_str("(")?;
            let mut p = start;
            while !visited[usize::from(p)] {
                visited[usize::from(p)] = true;
                write!(f, "{}", p + 1)?;
                p = self.apply(p);
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation() {
        assert_eq!(S3Perm::IDENTITY.to_string(), "()");
        assert_eq!(S3Perm([2, 1, 0]).to_string(), "(13)");
        assert_eq!(S3Perm([1, 2, 0]).to_string(), "(123)");
        assert_eq!(S3Perm([2, 0, 1]).to_string(), "(132)");
    }

    #[test]
    fn group_axioms() {
        for a in S3Perm::all() {
            assert!(a.compose(a.inverse()).is_identity());
            for b in S3Perm::all() {
                for c in S3Perm::all() {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                }
            }
        }
        let orders: Vec<u32> = S3Perm::all().iter().map(|p| p.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 3, 3, 2]);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(S3Perm::from_images([0, 0, 1]).is_none());
        assert!(S3Perm::from_images([0, 1, 3]).is_none());
    }
}
