//! Integral lattices given by a symmetric Gram matrix.
//!
//! Root lattices are stored negative definite, the convention under which the
//! K3 lattice is `U^3 ⊕ E8^2`. Use [`Lattice::rescale`] by `-1` for the
//! positive-definite variants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::{self, JsonInt};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not square: row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("A(n) needs n >= 1")]
    EmptyRootLattice,
    #[error("unrecognized lattice term {0:?}")]
    UnknownTerm(String),
}

/// Signature `(n₊, n₋, n₀)`; `n₀` is the rank of the radical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Signature { positive, negative, zero }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative + self.zero
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;

    fn add(self, o: Signature) -> Signature {
        Signature::new(self.positive + o.positive, self.negative + o.negative, self.zero + o.zero)
    }
}

/// The named building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardLattice {
    /// Hyperbolic plane.
    U,
    /// Negative-definite `A_n`.
    A(usize),
    /// Negative-definite `E_8`.
    E8,
    /// `U ⊕ U ⊕ U ⊕ E8 ⊕ E8`.
    K3,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<JsonInt>>", into = "Vec<Vec<JsonInt>>")]
pub struct Lattice {
    gram: Vec<Vec<BigInt>>,
}

impl TryFrom<Vec<Vec<JsonInt>>> for Lattice {
    type Error = LatticeError;

    fn try_from(rows: Vec<Vec<JsonInt>>) -> Result<Self, LatticeError> {
        Lattice::new(json::from_json_rows(rows))
    }
}

impl From<Lattice> for Vec<Vec<JsonInt>> {
    fn from(l: Lattice) -> Self {
        json::to_json_rows(&l.gram)
    }
}

impl Lattice {
    pub fn new(gram: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        for (row, r) in gram.iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Lattice { gram })
    }

    pub fn from_i64s(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    /// The rank-0 lattice, neutral for [`Lattice::direct_sum`].
    pub fn zero() -> Self {
        Lattice { gram: Vec::new() }
    }

    pub fn standard(name: StandardLattice) -> Result<Self, LatticeError> {
        Ok(match name {
            StandardLattice::U => hyperbolic_plane(),
            StandardLattice::A(0) => return Err(LatticeError::EmptyRootLattice),
            StandardLattice::A(n) => root_lattice_a(n),
            StandardLattice::E8 => root_lattice_e8(),
            StandardLattice::K3 => k3_lattice(),
        })
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![BigInt::zero(); a + b]; a + b];
        for i in 0..a {
            gram[i][..a].clone_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            gram[a + i][a..].clone_from_slice(&other.gram[i]);
        }
        Lattice { gram }
    }

    /// `L(n)`: the same module with the form multiplied by `n`.
    pub fn rescale(&self, n: &BigInt) -> Result<Lattice, LatticeError> {
        if n.is_zero() {
            return Err(LatticeError::ZeroScale);
        }
        let gram = self
            .gram
            .iter()
            .map(|r| r.iter().map(|v| v * n).collect())
            .collect();
        Ok(Lattice { gram })
    }

    pub fn det(&self) -> BigInt {
        linalg::det(&self.gram)
    }

    /// Diagonalizes the form by simultaneous row and column operations over
    /// `Q` and counts the signs of the diagonal.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
            .collect();
        let mut sig = Signature::new(0, 0, 0);
        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(p) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                    a.swap(k, p);
                    for row in a.iter_mut() {
                        row.swap(k, p);
                    }
                } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                    // every remaining diagonal entry is zero, so adding e_j to
                    // e_k makes the new diagonal entry 2·a[k][j]
                    for c in 0..n {
                        let v = a[j][c].clone();
                        a[k][c] += v;
                    }
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[k] += v;
                    }
                } else if let Some(i) = (k + 1..n).find(|&i| (k + 1..n).any(|j| !a[i][j].is_zero())) {
                    // row k is zero; move a row with off-diagonal mass here and retry
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                    let j = (k + 1..n).find(|&j| !a[k][j].is_zero()).expect("nonzero entry");
                    for c in 0..n {
                        let v = a[j][c].clone();
                        a[k][c] += v;
                    }
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[k] += v;
                    }
                } else {
                    sig.zero += n - k;
                    break;
                }
            }
            let pivot = a[k][k].clone();
            debug_assert!(!pivot.is_zero());
            if pivot.is_positive() {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
            for i in k + 1..n {
                if a[k][i].is_zero() {
                    continue;
                }
                let f = &a[k][i] / &pivot;
                for c in k..n {
                    let v = &f * &a[k][c];
                    a[i][c] -= v;
                }
                for r in k..n {
                    let v = &f * &a[r][k];
                    a[r][i] -= v;
                }
            }
        }
        sig
    }

    pub fn is_even(&self) -> bool {
        let two = BigInt::from(2);
        (0..self.rank()).all(|i| (&self.gram[i][i] % &two).is_zero())
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

pub fn hyperbolic_plane() -> Lattice {
    Lattice::from_i64s(&[&[0, 1], &[1, 0]]).expect("symmetric")
}

/// Negative-definite `A_n`: `-2` on the diagonal, `1` between neighbours on the path.
pub fn root_lattice_a(n: usize) -> Lattice {
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        gram[i][i] = BigInt::from(-2);
        if i + 1 < n {
            gram[i][i + 1] = BigInt::one();
            gram[i + 1][i] = BigInt::one();
        }
    }
    Lattice { gram }
}

/// Negative-definite `E_8`, from the Dynkin diagram: a path of seven nodes
/// with the eighth attached to the third.
pub fn root_lattice_e8() -> Lattice {
    const EDGES: [(usize, usize); 7] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
    let mut gram = vec![vec![BigInt::zero(); 8]; 8];
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] = BigInt::from(-2);
    }
    for (i, j) in EDGES {
        gram[i][j] = BigInt::one();
        gram[j][i] = BigInt::one();
    }
    Lattice { gram }
}

pub fn k3_lattice() -> Lattice {
    let u = hyperbolic_plane();
    let e8 = root_lattice_e8();
    [&u, &u, &e8, &e8].into_iter().fold(u.clone(), |acc, l| acc.direct_sum(l))
}

/// Parses sums like `U + U(11) + A10 + E8(-1)`.
///
/// A term is `U`, `E8`, `K3` or `A<n>`, optionally followed by `(k)` for the
/// rescaled lattice `L(k)`. The empty string is the rank-0 lattice.
impl FromStr for Lattice {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, LatticeError> {
        let mut acc = Lattice::zero();
        if s.trim().is_empty() {
            return Ok(acc);
        }
        for raw in s.split('+') {
            let term = raw.trim();
            let bad = || LatticeError::UnknownTerm(term.to_string());
            let (base, scale) = match term.find('(') {
                Some(open) => {
                    let inner = term[open + 1..].strip_suffix(')').ok_or_else(bad)?;
                    let k: BigInt = inner.trim().parse().map_err(|_| bad())?;
                    (term[..open].trim(), Some(k))
                }
                None => (term, None),
            };
            let name = match base.to_ascii_uppercase().as_str() {
                "U" => StandardLattice::U,
                "E8" => StandardLattice::E8,
                "K3" => StandardLattice::K3,
                other => {
                    let n = other
                        .strip_prefix('A')
                        .and_then(|d| d.trim_start_matches('_').parse::<usize>().ok())
                        .ok_or_else(bad)?;
                    StandardLattice::A(n)
                }
            };
            let mut l = Lattice::standard(name)?;
            if let Some(k) = scale {
                l = l.rescale(&k)?;
            }
            acc = acc.direct_sum(&l);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn u_gram_and_invariants() {
        let u = Lattice::standard(StandardLattice::U).unwrap();
        assert_eq!(u, Lattice::from_i64s(&[&[0, 1], &[1, 0]]).unwrap());
        assert_eq!(u.det(), big(-1));
        assert_eq!(u.signature(), Signature::new(1, 1, 0));
        assert!(u.is_even());
    }

    #[test]
    fn a1_is_minus_two() {
        let a1 = Lattice::standard(StandardLattice::A(1)).unwrap();
        assert_eq!(a1, Lattice::from_i64s(&[&[-2]]).unwrap());
        assert_eq!(a1.det(), big(-2));
        assert_eq!(
            Lattice::standard(StandardLattice::A(0)),
            Err(LatticeError::EmptyRootLattice)
        );
    }

    #[test]
    fn a_n_determinant() {
        // det of negative-definite A_n is (-1)^n (n + 1)
        for n in 1..=12usize {
            let expected = if n % 2 == 0 { n as i64 + 1 } else { -(n as i64 + 1) };
            assert_eq!(root_lattice_a(n).det(), big(expected), "n = {n}");
            assert_eq!(root_lattice_a(n).signature(), Signature::new(0, n, 0));
        }
    }

    #[test]
    fn e8_unimodular_negative_definite() {
        let e8 = root_lattice_e8();
        assert_eq!(e8.det(), big(1));
        assert_eq!(e8.signature(), Signature::new(0, 8, 0));
        assert!(e8.is_even());
    }

    #[test]
    fn k3_lattice_invariants() {
        let k3 = Lattice::standard(StandardLattice::K3).unwrap();
        assert_eq!(k3.rank(), 22);
        assert_eq!(k3.det(), big(-1));
        assert_eq!(k3.signature(), Signature::new(3, 19, 0));
        assert!(k3.is_even());
    }

    #[test]
    fn direct_sum_examples() {
        let u = hyperbolic_plane();
        let s = u.direct_sum(&root_lattice_a(10));
        assert_eq!(s.rank(), 12);
        assert_eq!(s.det(), big(-11));
        assert_eq!(u.direct_sum(&Lattice::zero()), u);
        assert_eq!(Lattice::zero().direct_sum(&u), u);
    }

    #[test]
    fn rescale_examples() {
        let u = hyperbolic_plane();
        let u11 = u.rescale(&big(11)).unwrap();
        assert_eq!(u11, Lattice::from_i64s(&[&[0, 11], &[11, 0]]).unwrap());
        assert_eq!(u11.det(), big(-121));
        assert_eq!(u.rescale(&big(1)).unwrap(), u);
        assert_eq!(u.rescale(&big(0)), Err(LatticeError::ZeroScale));
        assert_eq!(
            root_lattice_e8().rescale(&big(-1)).unwrap().signature(),
            Signature::new(8, 0, 0)
        );
    }

    #[test]
    fn odd_lattice() {
        assert!(!Lattice::from_i64s(&[&[1]]).unwrap().is_even());
    }

    #[test]
    fn degenerate_forms_report_radical() {
        let z = Lattice::from_i64s(&[&[0, 0], &[0, 0]]).unwrap();
        assert_eq!(z.signature(), Signature::new(0, 0, 2));
        assert_eq!(z.det(), big(0));
        // [[1,1],[1,1]] has a one-dimensional radical
        let l = Lattice::from_i64s(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(l.signature(), Signature::new(1, 0, 1));
        // zero first row, hyperbolic block behind it
        let l = Lattice::from_i64s(&[&[0, 0, 0], &[0, 0, 3], &[0, 3, 0]]).unwrap();
        assert_eq!(l.signature(), Signature::new(1, 1, 1));
    }

    #[test]
    fn rejects_bad_gram() {
        assert_eq!(
            Lattice::from_i64s(&[&[0, 1], &[2, 0]]),
            Err(LatticeError::NotSymmetric(0, 1))
        );
        assert!(matches!(
            Lattice::from_i64s(&[&[0, 1], &[1]]),
            Err(LatticeError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn parse_expressions() {
        let l: Lattice = "U + A10".parse().unwrap();
        assert_eq!(l, hyperbolic_plane().direct_sum(&root_lattice_a(10)));
        let l: Lattice = "U(11)".parse().unwrap();
        assert_eq!(l.det(), big(-121));
        let l: Lattice = "e8(-1)".parse().unwrap();
        assert_eq!(l.signature(), Signature::new(8, 0, 0));
        assert!("B3".parse::<Lattice>().is_err());
        assert!("U(".parse::<Lattice>().is_err());
        assert_eq!("".parse::<Lattice>().unwrap(), Lattice::zero());
    }

    #[test]
    fn json_is_row_major_nested_array() {
        let u11 = hyperbolic_plane().rescale(&big(11)).unwrap();
        let s = serde_json::to_string(&u11).unwrap();
        assert_eq!(s, "[[0,11],[11,0]]");
        assert!(serde_json::from_str::<Lattice>("[[0,1],[2,0]]").is_err());
    }
}
