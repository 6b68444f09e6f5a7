//! Kodaira singular fibers of elliptic K3 surfaces: Euler numbers, component
//! counts and the rank of the trivial lattice.
//!
//! The tables are the tame ones. In characteristic 2 and 3 additive fibers can
//! carry an extra wild contribution to the Euler number, which is not modelled.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KodairaFiber {
    /// `I_n`, `n >= 1`.
    I(u32),
    /// `I_n^*`, `n >= 0`.
    IStar(u32),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("unknown Kodaira fiber {0:?}")]
    UnknownFiber(String),
    #[error("I_n needs n >= 1")]
    ZeroMultiplicativeIndex,
}

use KodairaFiber::*;

impl KodairaFiber {
    pub fn i(n: u32) -> Result<Self, EllipticError> {
        if n == 0 {
            Err(EllipticError::ZeroMultiplicativeIndex)
        } else {
            Ok(I(n))
        }
    }

    pub fn euler_number(self) -> u32 {
        match self {
            I(n) => n,
            IStar(n) => n + 6,
            II => 2,
            III => 3,
            IV => 4,
            IIStar => 10,
            IIIStar => 9,
            IVStar => 8,
        }
    }

    /// Number of irreducible components of the fiber.
    pub fn components(self) -> u32 {
        match self {
            I(n) => n,
            IStar(n) => n + 5,
            II => 1,
            III => 2,
            IV => 3,
            IIStar => 9,
            IIIStar => 8,
            IVStar => 7,
        }
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, I(_))
    }
}

impl fmt::Display for KodairaFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            I(n) => write!(f, "I{n}"),
            IStar(n) => write!(f, "I{n}*"),
            II => write!(f, "II"),
            III => write!(f, "III"),
            IV => write!(f, "IV"),
            IIStar => write!(f, "II*"),
            IIIStar => write!(f, "III*"),
            IVStar => write!(f, "IV*"),
        }
    }
}

impl FromStr for KodairaFiber {
    type Err = EllipticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        let bad = || EllipticError::UnknownFiber(s.to_string());
        Ok(match t.as_str() {
            "II" => II,
            "III" => III,
            "IV" => IV,
            "II*" => IIStar,
            "III*" => IIIStar,
            "IV*" => IVStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(bad)?;
                let (digits, star) = match rest.strip_suffix('*') {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let n: u32 = digits.parse().map_err(|_| bad())?;
                if star {
                    IStar(n)
                } else {
                    KodairaFiber::i(n)?
                }
            }
        })
    }
}

impl Serialize for KodairaFiber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KodairaFiber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A multiset of singular fibers. Reads either a list of names or a map from
/// name to count; writes the map.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "ConfigRepr", into = "BTreeMap<KodairaFiber, u32>")]
pub struct FiberConfiguration {
    fibers: BTreeMap<KodairaFiber, u32>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigRepr {
    List(Vec<KodairaFiber>),
    Counts(BTreeMap<KodairaFiber, u32>),
}

impl From<ConfigRepr> for FiberConfiguration {
    fn from(r: ConfigRepr) -> Self {
        match r {
            ConfigRepr::List(v) => v.into_iter().collect(),
            ConfigRepr::Counts(m) => FiberConfiguration::new(m),
        }
    }
}

impl From<FiberConfiguration> for BTreeMap<KodairaFiber, u32> {
    fn from(c: FiberConfiguration) -> Self {
        c.fibers
    }
}

impl FromIterator<KodairaFiber> for FiberConfiguration {
    fn from_iter<T: IntoIterator<Item = KodairaFiber>>(iter: T) -> Self {
        FiberConfiguration::new(iter.into_iter().map(|f| (f, 1)))
    }
}

impl FiberConfiguration {
    pub fn new(counts: impl IntoIterator<Item = (KodairaFiber, u32)>) -> Self {
        let mut fibers = BTreeMap::new();
        for (f, k) in counts {
            if k > 0 {
                *fibers.entry(f).or_insert(0) += k;
            }
        }
        FiberConfiguration { fibers }
    }

    pub fn iter(&self) -> impl Iterator<Item = (KodairaFiber, u32)> + '_ {
        self.fibers.iter().map(|(&f, &k)| (f, k))
    }

    pub fn fiber_count(&self) -> u32 {
        self.fibers.values().sum()
    }

    pub fn euler_sum(&self) -> u64 {
        self.iter().map(|(f, k)| f.euler_number() as u64 * k as u64).sum()
    }

    pub fn has_additive(&self) -> bool {
        self.fibers.keys().any(|f| !f.is_multiplicative())
    }
}

impl fmt::Display for FiberConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(fib, k)| if k == 1 { fib.to_string() } else { format!("{k}x{fib}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn euler_number(f: KodairaFiber) -> u32 {
    f.euler_number()
}

pub fn check_k3_config(c: &FiberConfiguration) -> bool {
    c.euler_sum() == 24
}

/// Rank of the lattice spanned by the zero section, a fiber, and the fiber
/// components missing the zero section.
pub fn trivial_lattice_rank(c: &FiberConfiguration) -> u64 {
    2 + c.iter().map(|(f, k)| (f.components() as u64 - 1) * k as u64).sum::<u64>()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticReport {
    pub euler_sum: u64,
    pub is_k3: bool,
    pub trivial_lattice_rank: u64,
    /// Picard rank bound: 20 in characteristic 0, 22 otherwise.
    pub rank_bound: u64,
    pub lattice_feasible: bool,
    pub notes: Vec<String>,
}

/// Everything `check_k3_config` and `trivial_lattice_rank` know about `c`.
/// `characteristic` is the characteristic of the base field when known.
pub fn analyze(c: &FiberConfiguration, characteristic: Option<u64>) -> EllipticReport {
    let euler_sum = c.euler_sum();
    let rank = trivial_lattice_rank(c);
    let rank_bound = match characteristic {
        None | Some(0) => 20,
        Some(_) => 22,
    };
    let mut notes = Vec::new();
    if rank > rank_bound {
        notes.push(format!("trivial lattice rank {rank} exceeds the Picard rank bound {rank_bound}"));
    }
    if let Some(p) = characteristic {
        if p != 0 && p <= 3 && c.has_additive() {
            notes.push(format!(
                "characteristic {p}: additive fibers may have wild Euler contributions; tame values used"
            ));
        }
    }
    EllipticReport {
        euler_sum,
        is_k3: euler_sum == 24,
        trivial_lattice_rank: rank,
        rank_bound,
        lattice_feasible: rank <= rank_bound,
        notes,
    }
}
