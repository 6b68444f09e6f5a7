//! Exact integer polynomials, Euler's totient, cyclotomic polynomials and the
//! decomposition of a monic integer polynomial into cyclotomic factors.
//!
//! Everything here is integer arithmetic on [`BigInt`]; no value ever passes
//! through a float or a field of fractions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{divisors, factorize};
use crate::json::JsonInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("the zero polynomial has no cyclotomic factorization")]
    ZeroPolynomial,
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(BigInt),
    #[error("not a product of cyclotomic polynomials: cofactor {remaining} of degree {degree} remains")]
    NotCyclotomicProduct { remaining: IntPolynomial, degree: usize },
}

/// Polynomial in `Z[x]`, coefficients lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `degree` is `len - 1` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![BigInt::one()] }
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = -BigInt::one();
        coeffs[n] += BigInt::one();
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coefficient().is_some_and(One::is_one)
    }

    pub fn coefficient(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Quotient and remainder on division by a monic polynomial.
    pub fn div_rem_monic(&self, divisor: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = std::mem::take(&mut rem[i + dd]);
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs[..dd].iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// `Some(self / divisor)` when a monic `divisor` divides `self` exactly.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let (q, r) = self.div_rem_monic(divisor);
        r.is_zero().then_some(q)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Mul for IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: IntPolynomial) -> IntPolynomial {
        &self * &rhs
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let abs = c.abs();
            if i == 0 || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| JsonInt(c.clone())))
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<JsonInt>::deserialize(deserializer)?;
        Ok(IntPolynomial::new(coeffs.into_iter().map(|c| c.0).collect()))
    }
}

/// Euler's totient `#(Z/mZ)^*`, from the prime factorization of `m`.
/// Returns 0 for `m == 0`.
pub fn euler_phi(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    factorize(m)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// The `m`-th cyclotomic polynomial.
///
/// Built bottom-up over the divisors of `m`: each `Φ_d` is `x^d - 1` divided
/// exactly by the `Φ_e` for the proper divisors `e` of `d`.
///
/// # Panics
///
/// Panics if `m == 0`.
pub fn cyclotomic_poly(m: u64) -> IntPolynomial {
    assert!(m >= 1, "cyclotomic_poly: m must be positive");
    let divs = divisors(m);
    let mut built: BTreeMap<u64, IntPolynomial> = BTreeMap::new();
    for &d in &divs {
        let mut phi = IntPolynomial::x_pow_minus_one(d as usize);
        for (&e, phi_e) in &built {
            if d % e == 0 {
                phi = phi
                    .div_exact(phi_e)
                    .expect("cyclotomic factors divide x^d - 1");
            }
        }
        built.insert(d, phi);
    }
    built.remove(&m).expect("m divides itself")
}

/// A multiset of cyclotomic factors `Π Φ_m^{mult}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycloFactorization {
    factors: BTreeMap<u64, u32>,
}

impl CycloFactorization {
    /// Zero multiplicities are dropped. `m == 0` is not a cyclotomic index.
    pub fn new(factors: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, k) in factors {
            assert!(m >= 1, "cyclotomic index must be positive");
            if k > 0 {
                *map.entry(m).or_insert(0) += k;
            }
        }
        CycloFactorization { factors: map }
    }

    pub fn single(m: u64, mult: u32) -> Self {
        Self::new([(m, mult)])
    }

    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&m, &k)| (m, k))
    }

    pub fn multiplicity(&self, m: u64) -> u32 {
        self.factors.get(&m).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `Σ mult · φ(m)`.
    pub fn degree(&self) -> u64 {
        self.iter().map(|(m, k)| k as u64 * euler_phi(m)).sum()
    }

    pub fn expand(&self) -> IntPolynomial {
        self.iter()
            .fold(IntPolynomial::one(), |acc, (m, k)| &acc * &cyclotomic_poly(m).pow(k))
    }
}

impl fmt::Display for CycloFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(m, k)| if k == 1 { format!("Phi_{m}") } else { format!("Phi_{m}^{k}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Splits a monic integer polynomial into cyclotomic factors.
///
/// Candidates are the `m <= 2·deg²` with `φ(m) <= deg`, tried in increasing
/// order; each is divided out as long as it divides. Distinct cyclotomic
/// polynomials are coprime irreducibles, so the greedy pass never needs to
/// backtrack.
pub fn factor_into_cyclotomics(p: &IntPolynomial) -> Result<CycloFactorization, CyclotomicError> {
    let degree = p.degree().ok_or(CyclotomicError::ZeroPolynomial)?;
    let lead = p.leading_coefficient().expect("nonzero");
    if !lead.is_one() {
        return Err(CyclotomicError::NotMonic(lead.clone()));
    }
    let bound = 2 * (degree as u64).pow(2);
    let mut remaining = p.clone();
    let mut found = Vec::new();
    for m in 1..=bound {
        let rem_deg = remaining.degree().expect("monic cofactor") as u64;
        if rem_deg == 0 {
            break;
        }
        if euler_phi(m) > rem_deg {
            continue;
        }
        let phi = cyclotomic_poly(m);
        let mut mult = 0;
        while let Some(q) = remaining.div_exact(&phi) {
            remaining = q;
            mult += 1;
        }
        if mult > 0 {
            found.push((m, mult));
        }
    }
    match remaining.degree() {
        Some(0) => Ok(CycloFactorization::new(found)),
        Some(d) => Err(CyclotomicError::NotCyclotomicProduct { remaining, degree: d }),
        None => unreachable!("a monic polynomial never reduces to zero"),
    }
}

/// `{ m : φ(m) <= bound }`; finite since `φ(m) >= sqrt(m/2)`, i.e. `m <= 2·bound²`.
pub fn bounded_orders(bound: u64) -> BTreeSet<u64> {
    (1..=2 * bound * bound).filter(|&m| euler_phi(m) <= bound).collect()
}
