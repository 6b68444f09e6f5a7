//! Which Kulikov types a degeneration can have, given the order of the
//! non-symplectic automorphism group, the Hodge endomorphism field, or the
//! height; plus the dimension count for moduli of K3 surfaces with a
//! non-symplectic automorphism of prime order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::cyclotomic::bounded_orders;
use crate::sncfiber::KulikovType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HodgeFieldClass {
    Rational,
    ImaginaryQuadratic,
    CmDegreeGt2,
    TotallyRealDegreeGt1,
}

impl HodgeFieldClass {
    pub const ALL: [HodgeFieldClass; 4] = [
        HodgeFieldClass::Rational,
        HodgeFieldClass::ImaginaryQuadratic,
        HodgeFieldClass::CmDegreeGt2,
        HodgeFieldClass::TotallyRealDegreeGt1,
    ];

    /// Only the totally real case depends on the Hodge conjecture for `X × X`;
    /// it is known for CM fields and `Q` imposes nothing.
    pub fn is_conditional(self) -> bool {
        self == HodgeFieldClass::TotallyRealDegreeGt1
    }
}

impl std::str::FromStr for HodgeFieldClass {
    type Err = DegenerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rational" | "q" => Ok(HodgeFieldClass::Rational),
            "imaginary_quadratic" => Ok(HodgeFieldClass::ImaginaryQuadratic),
            "cm_degree_gt2" | "cm" => Ok(HodgeFieldClass::CmDegreeGt2),
            "totally_real_degree_gt1" | "totally_real" => Ok(HodgeFieldClass::TotallyRealDegreeGt1),
            _ => Err(DegenerationError::UnknownField(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HeightRepr", into = "HeightRepr")]
pub enum Height {
    Finite(u8),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HeightRepr {
    Finite(u8),
    Infinite(String),
}

impl TryFrom<HeightRepr> for Height {
    type Error = DegenerationError;

    fn try_from(r: HeightRepr) -> Result<Self, Self::Error> {
        match r {
            HeightRepr::Finite(h) => Height::finite(h),
            HeightRepr::Infinite(s) => s.parse(),
        }
    }
}

impl From<Height> for HeightRepr {
    fn from(h: Height) -> Self {
        match h {
            Height::Finite(h) => HeightRepr::Finite(h),
            Height::Infinite => HeightRepr::Infinite("infinite".into()),
        }
    }
}

impl Height {
    pub fn finite(h: u8) -> Result<Self, DegenerationError> {
        if (1..=10).contains(&h) {
            Ok(Height::Finite(h))
        } else {
            Err(DegenerationError::BadHeight(h.to_string()))
        }
    }
}

impl std::str::FromStr for Height {
    type Err = DegenerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" | "supersingular" => Ok(Height::Infinite),
            t => t
                .parse::<u8>()
                .map_err(|_| DegenerationError::BadHeight(s.to_string()))
                .and_then(Height::finite),
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegenerationError {
    #[error("order must be positive")]
    ZeroOrder,
    #[error("no constraint given")]
    NoConstraint,
    #[error("unknown Hodge field class {0:?}")]
    UnknownField(String),
    #[error("height must be 1..=10 or infinite, got {0:?}")]
    BadHeight(String),
    #[error("characteristic {0} is neither 0 nor a prime")]
    BadCharacteristic(u64),
    #[error("the Hodge field constraint needs characteristic 0, got {0}")]
    FieldNeedsChar0(u64),
    #[error("height is only defined in positive characteristic")]
    HeightNeedsCharP,
    #[error("p = {0} must be a prime in 3..=19")]
    BadModuliPrime(u64),
    #[error("rank of S = {0} must be in 1..=21")]
    BadModuliRank(u32),
    #[error("p - 1 = {p_minus_1} does not divide 22 - rank = {corank}")]
    NotDivisible { p_minus_1: u64, corank: u64 },
    #[error("22 - rank = {corank} gives a negative dimension for p = {p}")]
    NegativeDimension { p: u64, corank: u64 },
}

/// A subset of `{I, II, III}`, serialized as a sorted list of names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeSet(BTreeSet<KulikovType>);

impl TypeSet {
    pub fn all() -> Self {
        TypeSet(KulikovType::ALL.into())
    }

    pub fn of(types: &[KulikovType]) -> Self {
        TypeSet(types.iter().copied().collect())
    }

    pub fn contains(&self, t: KulikovType) -> bool {
        self.0.contains(&t)
    }

    pub fn intersect(&self, other: &TypeSet) -> TypeSet {
        TypeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &TypeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = KulikovType> + '_ {
        self.0.iter().copied()
    }

    fn complement(&self) -> Vec<KulikovType> {
        KulikovType::ALL.into_iter().filter(|t| !self.contains(*t)).collect()
    }
}

impl fmt::Display for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.iter().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

use KulikovType::{I, II, III};

pub fn allowed_types_from_m(m: u64) -> Result<TypeSet, DegenerationError> {
    Ok(match m {
        0 => return Err(DegenerationError::ZeroOrder),
        1 | 2 => TypeSet::all(),
        3 | 4 | 6 => TypeSet::of(&[I, II]),
        _ => TypeSet::of(&[I]),
    })
}

pub fn allowed_types_from_field(e: HodgeFieldClass) -> TypeSet {
    match e {
        HodgeFieldClass::Rational => TypeSet::all(),
        HodgeFieldClass::ImaginaryQuadratic => TypeSet::of(&[I, II]),
        HodgeFieldClass::CmDegreeGt2 | HodgeFieldClass::TotallyRealDegreeGt1 => TypeSet::of(&[I]),
    }
}

/// Orders `m(X)` compatible with a special fiber of the given type.
pub fn allowed_m_from_type(t: KulikovType) -> BTreeSet<u64> {
    match t {
        III => [1, 2].into(),
        II => [1, 2, 3, 4, 6].into(),
        I => bounded_orders(20),
    }
}

/// Type II fibers have height at most 2, Type III height 1, and the height
/// can only drop under specialization.
pub fn allowed_types_from_height(h: Height) -> TypeSet {
    match h {
        Height::Finite(1) => TypeSet::all(),
        Height::Finite(2) => TypeSet::of(&[I, II]),
        _ => TypeSet::of(&[I]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Constraints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<HodgeFieldClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<Height>,
    /// Characteristic of the fraction field `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionStatus {
    Decided,
    OutsideHypotheses,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub status: DecisionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allowed: Option<TypeSet>,
    pub conditional: bool,
    pub reasons: Vec<String>,
}

/// Intersection of the constraints that are present.
pub fn combine(
    m: Option<u64>,
    e: Option<HodgeFieldClass>,
    h: Option<Height>,
) -> Result<TypeSet, DegenerationError> {
    if m.is_none() && e.is_none() && h.is_none() {
        return Err(DegenerationError::NoConstraint);
    }
    let mut out = TypeSet::all();
    if let Some(m) = m {
        out = out.intersect(&allowed_types_from_m(m)?);
    }
    if let Some(e) = e {
        out = out.intersect(&allowed_types_from_field(e));
    }
    if let Some(h) = h {
        out = out.intersect(&allowed_types_from_height(h));
    }
    Ok(out)
}

fn excluded(label: String, set: &TypeSet) -> String {
    let gone = set.complement();
    if gone.is_empty() {
        format!("{label} excludes nothing")
    } else {
        let names: Vec<String> = gone.iter().map(|t| t.to_string()).collect();
        format!("{label} excludes type {}", names.join(" and "))
    }
}

/// Validates the constraints against the characteristic and explains each one.
pub fn decide(c: &Constraints) -> Result<Decision, DegenerationError> {
    if c.m.is_none() && c.field.is_none() && c.height.is_none() {
        return Err(DegenerationError::NoConstraint);
    }
    if let Some(p) = c.char {
        if p != 0 && !is_prime(p) {
            return Err(DegenerationError::BadCharacteristic(p));
        }
        if p != 0 && c.field.is_some() {
            return Err(DegenerationError::FieldNeedsChar0(p));
        }
        if p == 0 && c.height.is_some() {
            return Err(DegenerationError::HeightNeedsCharP);
        }
        if p == 2 {
            return Ok(Decision {
                status: DecisionStatus::OutsideHypotheses,
                allowed: None,
                conditional: false,
                reasons: vec!["characteristic 2 lies outside the hypotheses of the classification".into()],
            });
        }
    }
    if c.m == Some(0) {
        return Err(DegenerationError::ZeroOrder);
    }
    let mut reasons = Vec::new();
    if let Some(m) = c.m {
        reasons.push(excluded(format!("m = {m}"), &allowed_types_from_m(m)?));
    }
    if let Some(e) = c.field {
        let mut r = excluded(format!("Hodge field {e:?}"), &allowed_types_from_field(e));
        if e.is_conditional() {
            r.push_str(" (conditional on the Hodge conjecture for X x X)");
        }
        reasons.push(r);
    }
    if let Some(h) = c.height {
        reasons.push(excluded(format!("height {h}"), &allowed_types_from_height(h)));
    }
    let allowed = combine(c.m, c.field, c.height)?;
    // a conditional exclusion only matters if nothing unconditional already made it
    let unconditional = combine(c.m, c.field.filter(|e| !e.is_conditional()), c.height).unwrap_or_else(|_| TypeSet::all());
    Ok(Decision {
        status: DecisionStatus::Decided,
        conditional: unconditional != allowed,
        allowed: Some(allowed),
        reasons,
    })
}

/// Dimension `(22 - rank_S)/(p - 1) - 1` of the complex ball parametrising
/// K3 surfaces with a non-symplectic automorphism of odd prime order `p`
/// whose invariant lattice has rank `rank_S`.
pub fn moduli_dim(p: u64, rank_s: u32) -> Result<u64, DegenerationError> {
    if !(3..=19).contains(&p) || !is_prime(p) {
        return Err(DegenerationError::BadModuliPrime(p));
    }
    if !(1..=21).contains(&rank_s) {
        return Err(DegenerationError::BadModuliRank(rank_s));
    }
    let corank = 22 - rank_s as u64;
    if corank % (p - 1) != 0 {
        return Err(DegenerationError::NotDivisible { p_minus_1: p - 1, corank });
    }
    let q = corank / (p - 1);
    if q == 0 {
        return Err(DegenerationError::NegativeDimension { p, corank });
    }
    Ok(q - 1)
}

/// Whether K3 surfaces over number fields with a non-symplectic automorphism
/// of prime order `p` are known to have potential good reduction everywhere.
pub fn potential_good_reduction_implied(p: u64) -> bool {
    is_prime(p) && p >= 5
}
