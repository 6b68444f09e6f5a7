//! Orders of non-symplectic automorphisms and the characteristic polynomials
//! they can have on the transcendental part of `H^2`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, pow_mod, Prime};
use crate::cyclotomic::{euler_phi, CycloFactorization};

/// Largest transcendental rank of a projective K3 surface.
pub const DEFAULT_T_RANK_CAP: u32 = 21;

pub const SIGMA0_RANGE: std::ops::RangeInclusive<u32> = 1..=10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharSetting {
    Char0,
    /// The automorphism lifts to characteristic zero.
    Liftable { p: Prime },
    FiniteHeight { p: Prime },
    /// Finite height and defined over a finite field.
    FiniteField { p: Prime },
}

impl CharSetting {
    pub fn characteristic(&self) -> u64 {
        match self {
            CharSetting::Char0 => 0,
            CharSetting::Liftable { p } | CharSetting::FiniteHeight { p } | CharSetting::FiniteField { p } => p.get(),
        }
    }
}

impl fmt::Display for CharSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharSetting::Char0 => write!(f, "char 0"),
            CharSetting::Liftable { p } => write!(f, "char {p}, liftable"),
            CharSetting::FiniteHeight { p } => write!(f, "char {p}, finite height"),
            CharSetting::FiniteField { p } => write!(f, "char {p}, finite height over a finite field"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutOrdersError {
    #[error("order must be positive")]
    ZeroOrder,
    #[error("transcendental rank {t_rank} outside 1..={cap}")]
    TRankOutOfRange { t_rank: u32, cap: u32 },
    #[error("{p} divides the order {m}")]
    PDividesOrder { p: u64, m: u64 },
    #[error("{setting} needs an odd prime")]
    EvenPrime { setting: CharSetting },
    #[error("bound must be positive")]
    ZeroBound,
}

/// Whether a candidate has a single non-trivial cyclotomic factor or several
/// distinct ones, which no known obstruction rules out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    SingleFactor,
    MultiFactorOpen,
}

pub fn candidate_status(f: &CycloFactorization) -> CandidateStatus {
    if f.factors().len() > 1 {
        CandidateStatus::MultiFactorOpen
    } else {
        CandidateStatus::SingleFactor
    }
}

pub fn admissible_transcendental_charpolys(
    m: u64,
    setting: CharSetting,
    t_rank: u32,
) -> Result<Vec<CycloFactorization>, AutOrdersError> {
    admissible_transcendental_charpolys_with_cap(m, setting, t_rank, DEFAULT_T_RANK_CAP)
}

pub fn admissible_transcendental_charpolys_with_cap(
    m: u64,
    setting: CharSetting,
    t_rank: u32,
    cap: u32,
) -> Result<Vec<CycloFactorization>, AutOrdersError> {
    if m == 0 {
        return Err(AutOrdersError::ZeroOrder);
    }
    if t_rank == 0 || t_rank > cap {
        return Err(AutOrdersError::TRankOutOfRange { t_rank, cap });
    }
    let t = t_rank as u64;
    let p = match setting {
        CharSetting::Char0 => {
            let phi = euler_phi(m);
            return Ok(if t % phi == 0 {
                vec![CycloFactorization::single(m, (t / phi) as u32)]
            } else {
                Vec::new()
            });
        }
        CharSetting::Liftable { p } => p,
        CharSetting::FiniteHeight { p } | CharSetting::FiniteField { p } => {
            if !p.is_odd() {
                return Err(AutOrdersError::EvenPrime { setting });
            }
            p
        }
    };
    let p = p.get();
    if m % p == 0 {
        return Err(AutOrdersError::PDividesOrder { p, m });
    }
    // orders m p^e whose cyclotomic degree still fits
    let mut orders = Vec::new();
    let mut d = m;
    while euler_phi(d) <= t {
        orders.push((d, euler_phi(d)));
        d *= p;
    }
    if !matches!(setting, CharSetting::FiniteHeight { .. }) {
        return Ok(orders
            .iter()
            .filter(|(_, phi)| t % phi == 0)
            .map(|&(d, phi)| CycloFactorization::single(d, (t / phi) as u32))
            .collect());
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    multisets(&orders, t, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn multisets(
    orders: &[(u64, u64)],
    remaining: u64,
    chosen: &mut Vec<(u64, u32)>,
    out: &mut Vec<CycloFactorization>,
) {
    let Some((&(d, phi), rest)) = orders.split_first() else {
        if remaining == 0 {
            out.push(CycloFactorization::new(chosen.iter().copied()));
        }
        return;
    };
    for k in 0..=remaining / phi {
        chosen.push((d, k as u32));
        multisets(rest, remaining - k * phi, chosen, out);
        chosen.pop();
    }
}

/// Prime powers `q = p^e`, `e >= 1`, with `φ(q) <= max_t`.
pub fn wild_prime_powers(max_t: u64) -> Result<BTreeSet<u64>, AutOrdersError> {
    if max_t == 0 {
        return Err(AutOrdersError::ZeroBound);
    }
    let mut out = BTreeSet::new();
    // φ(p^e) >= p^e / 2
    for p in (2..=2 * max_t).filter(|&p| is_prime(p)) {
        let mut q = p;
        while q <= 2 * max_t {
            if euler_phi(q) <= max_t {
                out.insert(q);
            }
            q *= p;
        }
    }
    Ok(out)
}

/// Artin invariants `σ0 ∈ 1..=10` with `m | p^σ0 + 1`.
pub fn nygaard_sigma0(m: u64, p: Prime) -> BTreeSet<u32> {
    if m == 0 {
        return BTreeSet::new();
    }
    SIGMA0_RANGE
        .filter(|&s| (pow_mod(p.get(), s as u64, m) + 1) % m == 0)
        .collect()
}

/// True iff the factors have total degree 22, the dimension of `H^2`.
pub fn verify_het2_factorization(f: &CycloFactorization) -> bool {
    f.degree() == 22
}

/// Splits `n = p^e · r` with `p ∤ r`.
pub fn order_decomposition(n: u64, p: Prime) -> Result<(u32, u64), AutOrdersError> {
    if n == 0 {
        return Err(AutOrdersError::ZeroOrder);
    }
    let p = p.get();
    let (mut e, mut r) = (0, n);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    Ok((e, r))
}

/// Consistency of a lifted automorphism of order `q · n` (`q` a power of `p`,
/// `p ∤ n`) whose action on `H^2` has characteristic polynomial `f`: the
/// degree is 22 and `Φ_{qn}` occurs.
pub fn check_lift_row(q: u64, n: u64, f: &CycloFactorization) -> bool {
    let Some((p, _)) = crate::arith::prime_power(q) else {
        return false;
    };
    let p = Prime::new(p).expect("prime power base is prime");
    let Ok((e, rest)) = order_decomposition(q * n, p) else {
        return false;
    };
    p.get().pow(e) == q && rest == n && f.multiplicity(q * n) > 0 && verify_het2_factorization(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn fac(pairs: &[(u64, u32)]) -> CycloFactorization {
        CycloFactorization::new(pairs.iter().copied())
    }

    #[test]
    fn char0_charpolys() {
        assert_eq!(admissible_transcendental_charpolys(42, CharSetting::Char0, 12).unwrap(), vec![fac(&[(42, 1)])]);
        assert_eq!(admissible_transcendental_charpolys(1, CharSetting::Char0, 1).unwrap(), vec![fac(&[(1, 1)])]);
        assert_eq!(admissible_transcendental_charpolys(3, CharSetting::Char0, 20).unwrap(), vec![fac(&[(3, 10)])]);
        assert!(admissible_transcendental_charpolys(42, CharSetting::Char0, 13).unwrap().is_empty());
    }

    #[test]
    fn finite_field_charpolys() {
        let got = admissible_transcendental_charpolys(1, CharSetting::FiniteField { p: pr(11) }, 20).unwrap();
        assert_eq!(got, vec![fac(&[(1, 20)]), fac(&[(11, 2)])]);
        // order 21 in char 2, liftable: Φ21 and Φ42 have degree 12
        let got = admissible_transcendental_charpolys(21, CharSetting::Liftable { p: pr(2) }, 12).unwrap();
        assert_eq!(got, vec![fac(&[(21, 1)]), fac(&[(42, 1)])]);
    }

    #[test]
    fn finite_height_multisets() {
        let s = CharSetting::FiniteHeight { p: pr(3) };
        let got = admissible_transcendental_charpolys(1, s, 4).unwrap();
        // a + 2b = 4 over Φ1, Φ3
        let want = [fac(&[(1, 4)]), fac(&[(1, 2), (3, 1)]), fac(&[(3, 2)])];
        assert_eq!(got.len(), 3);
        for w in &want {
            assert!(got.contains(w), "{w}");
        }
        assert_eq!(candidate_status(&fac(&[(1, 2), (3, 1)])), CandidateStatus::MultiFactorOpen);
        assert_eq!(candidate_status(&fac(&[(3, 2)])), CandidateStatus::SingleFactor);
        for f in admissible_transcendental_charpolys(2, CharSetting::FiniteHeight { p: pr(5) }, 21).unwrap() {
            assert_eq!(f.degree(), 21);
            assert!(f.iter().all(|(d, _)| d % 2 == 0 && order_decomposition(d, pr(5)).unwrap().1 == 2));
        }
    }

    #[test]
    fn charpoly_errors() {
        assert_eq!(
            admissible_transcendental_charpolys(1, CharSetting::Char0, 22),
            Err(AutOrdersError::TRankOutOfRange { t_rank: 22, cap: 21 })
        );
        assert_eq!(admissible_transcendental_charpolys_with_cap(1, CharSetting::Char0, 22, 22).unwrap().len(), 1);
        assert!(admissible_transcendental_charpolys(1, CharSetting::Char0, 0).is_err());
        assert_eq!(
            admissible_transcendental_charpolys(6, CharSetting::Liftable { p: pr(3) }, 2),
            Err(AutOrdersError::PDividesOrder { p: 3, m: 6 })
        );
        assert!(matches!(
            admissible_transcendental_charpolys(1, CharSetting::FiniteHeight { p: pr(2) }, 2),
            Err(AutOrdersError::EvenPrime { .. })
        ));
        assert_eq!(admissible_transcendental_charpolys(0, CharSetting::Char0, 2), Err(AutOrdersError::ZeroOrder));
    }

    #[test]
    fn wild_powers() {
        let want: BTreeSet<u64> = [2, 4, 8, 16, 32, 3, 9, 27, 5, 25, 7, 11, 13, 17, 19].into();
        assert_eq!(wild_prime_powers(21).unwrap(), want);
        assert_eq!(wild_prime_powers(1).unwrap(), BTreeSet::from([2]));
        let mut with23 = want.clone();
        with23.insert(23);
        assert_eq!(wild_prime_powers(22).unwrap(), with23);
        assert!(wild_prime_powers(0).is_err());
    }

    #[test]
    fn wild_powers_brute_force() {
        for t in 1..=40 {
            let want: BTreeSet<u64> = (2..=1000)
                .filter(|&q| crate::arith::prime_power(q).is_some() && euler_phi(q) <= t)
                .collect();
            assert_eq!(wild_prime_powers(t).unwrap(), want, "max_t {t}");
        }
    }

    fn sigma0_bigint(m: u64, p: u64) -> BTreeSet<u32> {
        let m = BigInt::from(m);
        SIGMA0_RANGE
            .filter(|&s| ((BigInt::from(p).pow(s) + BigInt::one()) % &m).is_zero())
            .collect()
    }

    #[test]
    fn sigma0_examples() {
        assert!(nygaard_sigma0(42, pr(2)).is_empty());
        assert_eq!(nygaard_sigma0(1, pr(7)), SIGMA0_RANGE.collect());
        assert_eq!(nygaard_sigma0(6, pr(5)), BTreeSet::from([1, 3, 5, 7, 9]));
        for m in 1..=70 {
            for p in [2, 3, 5, 7, 11, 13] {
                assert_eq!(nygaard_sigma0(m, pr(p)), sigma0_bigint(m, p), "m {m}, p {p}");
            }
        }
    }

    #[test]
    fn decomposition() {
        assert_eq!(order_decomposition(28, pr(2)), Ok((2, 7)));
        assert_eq!(order_decomposition(7, pr(2)), Ok((0, 7)));
        assert_eq!(order_decomposition(66, pr(3)), Ok((1, 22)));
        assert_eq!(order_decomposition(0, pr(3)), Err(AutOrdersError::ZeroOrder));
    }

    #[test]
    fn het2() {
        assert!(verify_het2_factorization(&fac(&[(1, 10), (42, 1)])));
        assert!(verify_het2_factorization(&fac(&[(1, 22)])));
        assert!(verify_het2_factorization(&fac(&[(1, 2), (66, 1)])));
        assert!(!verify_het2_factorization(&fac(&[(1, 2), (42, 1)])));
    }

    #[test]
    fn lift_rows() {
        assert!(check_lift_row(4, 7, &fac(&[(1, 10), (28, 1)])));
        assert!(check_lift_row(5, 8, &fac(&[(1, 2), (5, 1), (40, 1)])));
        assert!(!check_lift_row(4, 14, &fac(&[(1, 10), (56, 1)])));
        assert!(!check_lift_row(6, 7, &fac(&[(1, 10), (42, 1)])));
        assert!(!check_lift_row(2, 21, &fac(&[(1, 10), (21, 1)])));
    }

    #[test]
    fn setting_json() {
        let s = CharSetting::FiniteField { p: pr(11) };
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"finite_field","p":11}"#);
        assert_eq!(serde_json::to_string(&CharSetting::Char0).unwrap(), r#"{"kind":"char0"}"#);
        assert!(serde_json::from_str::<CharSetting>(r#"{"kind":"liftable","p":9}"#).is_err());
    }
}
