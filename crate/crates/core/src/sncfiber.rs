//! Combinatorial special fibers of semistable K3 degenerations.
//!
//! An [`SncSurface`] records the components of a simple normal crossing
//! surface with their first two Betti numbers, the double curves with their
//! genera, and the triple points. From that data this module decides the
//! Kulikov type, tabulates the weight-graded dimensions of `H^2` of the
//! generic fiber, and evaluates the `E_1` page of the weight spectral
//! sequence at the level of dimensions.
//!
//! Types II and III are recognised from the surrogates available in the
//! input: rational means `b1 = 0`, elliptic ruled means `b1 = 2`, unless a
//! `kind` tag says more.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dualcomplex::{DeltaComplex, Edge, EdgeId, SphereCheck, Triangle, TriangleId, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveId(pub u32);

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z{}", self.0)
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Rational,
    EllipticRuled,
    K3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: ComponentId,
    pub b1: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SurfaceKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCurve {
    pub id: CurveId,
    pub components: [ComponentId; 2],
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriplePoint {
    pub curves: [CurveId; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SncError {
    #[error("duplicate component id {0}")]
    DuplicateComponent(ComponentId),
    #[error("duplicate double curve id {0}")]
    DuplicateCurve(CurveId),
    #[error("double curve {curve} refers to unknown component {component}")]
    UnknownComponent { curve: CurveId, component: ComponentId },
    #[error("double curve {0} must join two distinct components")]
    SelfIntersection(CurveId),
    #[error("triple point refers to unknown double curve {0}")]
    UnknownCurve(CurveId),
    #[error("triple point {0:?}: {1}")]
    BadTriplePoint([CurveId; 3], &'static str),
    #[error("not a Kulikov fiber: {0}")]
    NotKulikov(String),
    #[error("component {0} has no b2")]
    MissingBetti(ComponentId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SncSurfaceRaw {
    pub components: Vec<Component>,
    #[serde(default)]
    pub double_curves: Vec<DoubleCurve>,
    #[serde(default)]
    pub triple_points: Vec<TriplePoint>,
}

/// A validated combinatorial SNC surface. Lists are kept sorted by id (triple
/// points by their sorted curve triple) so that every derived quantity is
/// independent of input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SncSurfaceRaw", into = "SncSurfaceRaw")]
pub struct SncSurface {
    components: BTreeMap<ComponentId, Component>,
    curves: BTreeMap<CurveId, DoubleCurve>,
    triple_points: Vec<TriplePoint>,
}

impl TryFrom<SncSurfaceRaw> for SncSurface {
    type Error = SncError;

    fn try_from(raw: SncSurfaceRaw) -> Result<Self, SncError> {
        SncSurface::new(raw.components, raw.double_curves, raw.triple_points)
    }
}

impl From<SncSurface> for SncSurfaceRaw {
    fn from(s: SncSurface) -> Self {
        SncSurfaceRaw {
            components: s.components.into_values().collect(),
            double_curves: s.curves.into_values().collect(),
            triple_points: s.triple_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KulikovType {
    I,
    II,
    III,
}

impl KulikovType {
    pub const ALL: [KulikovType; 3] = [KulikovType::I, KulikovType::II, KulikovType::III];
}

impl fmt::Display for KulikovType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KulikovType::I => "I",
            KulikovType::II => "II",
            KulikovType::III => "III",
        })
    }
}

/// `dim gr^W_n H^2` for `n = 0..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GrWDims(pub [u32; 5]);

impl GrWDims {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..5).all(|n| self.0[n] == self.0[4 - n])
    }
}

pub fn grw_dims(t: KulikovType) -> GrWDims {
    GrWDims(match t {
        KulikovType::I => [0, 0, 22, 0, 0],
        KulikovType::II => [0, 2, 18, 2, 0],
        KulikovType::III => [1, 0, 20, 0, 1],
    })
}

/// Dimensions `E_1^{p,q}` for `p ∈ -2..=2`, `q ∈ 0..=4`, stored as
/// `entries[p + 2][q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct E1Page(pub [[u64; 5]; 5]);

impl E1Page {
    pub fn get(&self, p: i32, q: i32) -> u64 {
        if !(-2..=2).contains(&p) || !(0..=4).contains(&q) {
            return 0;
        }
        self.0[(p + 2) as usize][q as usize]
    }

    /// `Σ (-1)^{p+q} E_1^{p,q}`, the Euler characteristic of the generic fiber.
    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for p in -2..=2 {
            for q in 0..=4 {
                let v = self.get(p, q) as i64;
                chi += if (p + q).rem_euclid(2) == 0 { v } else { -v };
            }
        }
        chi
    }

    /// Total dimension on the antidiagonal `p + q = k`.
    pub fn antidiagonal(&self, k: i32) -> u64 {
        (-2..=2).map(|p| self.get(p, k - p)).sum()
    }
}

/// Betti numbers of the strata `X^(0)`, `X^(1)`, `X^(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataBetti {
    pub surfaces: [u64; 5],
    pub curves: [u64; 3],
    pub points: u64,
}

impl StrataBetti {
    /// `b_j(X^(k))`, zero outside the strata and degrees that exist.
    pub fn get(&self, k: i32, j: i32) -> u64 {
        if j < 0 {
            return 0;
        }
        let j = j as usize;
        match k {
            0 => self.surfaces.get(j).copied().unwrap_or(0),
            1 => self.curves.get(j).copied().unwrap_or(0),
            2 if j == 0 => self.points,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub kulikov_type: KulikovType,
    pub grw: GrWDims,
    pub dual_h2: usize,
    pub checks: Vec<CheckResult>,
}

impl CrosscheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn not_kulikov(reason: impl Into<String>) -> SncError {
    SncError::NotKulikov(reason.into())
}

fn shared(a: &DoubleCurve, b: &DoubleCurve) -> Vec<ComponentId> {
    a.components.iter().filter(|c| b.components.contains(c)).copied().collect()
}

impl SncSurface {
    pub fn new(
        components: impl IntoIterator<Item = Component>,
        curves: impl IntoIterator<Item = DoubleCurve>,
        triple_points: impl IntoIterator<Item = TriplePoint>,
    ) -> Result<Self, SncError> {
        let mut comps = BTreeMap::new();
        for c in components {
            let id = c.id;
            if comps.insert(id, c).is_some() {
                return Err(SncError::DuplicateComponent(id));
            }
        }
        let mut cmap = BTreeMap::new();
        for c in curves {
            for &component in &c.components {
                if !comps.contains_key(&component) {
                    return Err(SncError::UnknownComponent { curve: c.id, component });
                }
            }
            if c.components[0] == c.components[1] {
                return Err(SncError::SelfIntersection(c.id));
            }
            let id = c.id;
            if cmap.insert(id, c).is_some() {
                return Err(SncError::DuplicateCurve(id));
            }
        }
        let mut points = Vec::new();
        for tp in triple_points {
            let ids = tp.curves;
            let cs: Vec<&DoubleCurve> = ids
                .iter()
                .map(|id| cmap.get(id).ok_or(SncError::UnknownCurve(*id)))
                .collect::<Result<_, _>>()?;
            if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
                return Err(SncError::BadTriplePoint(ids, "curves must be distinct"));
            }
            let mut meets = BTreeSet::new();
            for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                match shared(cs[a], cs[b]).as_slice() {
                    [c] => {
                        meets.insert(*c);
                    }
                    _ => return Err(SncError::BadTriplePoint(ids, "curves must pairwise share exactly one component")),
                }
            }
            if meets.len() != 3 {
                return Err(SncError::BadTriplePoint(ids, "the three components must be distinct"));
            }
            let mut sorted = ids;
            sorted.sort();
            points.push(TriplePoint { curves: sorted });
        }
        points.sort();
        Ok(SncSurface { components: comps, curves: cmap, triple_points: points })
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn double_curves(&self) -> impl Iterator<Item = &DoubleCurve> {
        self.curves.values()
    }

    pub fn triple_points(&self) -> &[TriplePoint] {
        &self.triple_points
    }

    /// Vertex per component, edge per double curve, triangle per triple point.
    pub fn dual_complex(&self) -> DeltaComplex {
        let vertices = self.components.keys().map(|c| VertexId(c.0));
        let edges = self.curves.values().map(|c| Edge {
            id: EdgeId(c.id.0),
            v: c.components.map(|x| VertexId(x.0)),
        });
        let triangles = self.triple_points.iter().enumerate().map(|(k, tp)| {
            let cs = tp.curves.map(|id| &self.curves[&id]);
            // corner i sits where side i-1 meets side i
            let corner = |a: usize, b: usize| VertexId(shared(cs[a], cs[b])[0].0);
            Triangle {
                id: TriangleId(k as u32),
                edges: tp.curves.map(|c| EdgeId(c.0)),
                vertices: [corner(2, 0), corner(0, 1), corner(1, 2)],
                signs: None,
            }
        });
        DeltaComplex::new(vertices, edges, triangles).expect("validated triple points bound triangles")
    }

    pub fn classify(&self) -> Result<KulikovType, SncError> {
        if self.components.is_empty() {
            return Err(not_kulikov("empty fiber"));
        }
        if self.components.len() == 1 {
            self.check_type_i()
        } else if self.triple_points.is_empty() {
            self.check_type_ii()
        } else {
            self.check_type_iii()
        }
    }

    fn check_type_i(&self) -> Result<KulikovType, SncError> {
        let c = self.components.values().next().expect("one component");
        if let Some(kind) = c.kind {
            if kind != SurfaceKind::K3 {
                return Err(not_kulikov(format!("single component {} is tagged {kind:?}, not k3", c.id)));
            }
        }
        if c.b1 != 0 {
            return Err(not_kulikov(format!("single component {} has b1 = {}, not 0", c.id, c.b1)));
        }
        if let Some(b2) = c.b2 {
            if b2 != 22 {
                return Err(not_kulikov(format!("single component {} has b2 = {b2}, not 22", c.id)));
            }
        }
        Ok(KulikovType::I)
    }

    /// Components in chain order, if the dual graph is a path.
    fn chain_order(&self) -> Result<Vec<ComponentId>, String> {
        let n = self.components.len();
        if self.curves.len() != n - 1 {
            return Err(format!(
                "dual graph is not a path: {} double curves for {n} components",
                self.curves.len()
            ));
        }
        let mut adj: BTreeMap<ComponentId, Vec<ComponentId>> =
            self.components.keys().map(|&c| (c, Vec::new())).collect();
        for c in self.curves.values() {
            let [a, b] = c.components;
            adj.get_mut(&a).expect("validated").push(b);
            adj.get_mut(&b).expect("validated").push(a);
        }
        if let Some((c, nb)) = adj.iter().find(|(_, nb)| nb.len() > 2) {
            return Err(format!("dual graph is not a path: component {c} meets {} others", nb.len()));
        }
        let start = *adj
            .iter()
            .find(|(_, nb)| nb.len() == 1)
            .map(|(c, _)| c)
            .ok_or("dual graph is not a path: no end component")?;
        let mut order = vec![start];
        let mut prev = None;
        let mut cur = start;
        while let Some(&next) = adj[&cur].iter().find(|&&x| Some(x) != prev) {
            if order.contains(&next) {
                return Err("dual graph is not a path: it has a cycle".into());
            }
            order.push(next);
            prev = Some(cur);
            cur = next;
        }
        if order.len() != n {
            return Err("dual graph is not a path: it is disconnected".into());
        }
        Ok(order)
    }

    fn check_type_ii(&self) -> Result<KulikovType, SncError> {
        let order = self.chain_order().map_err(not_kulikov)?;
        if let Some(c) = self.curves.values().find(|c| c.genus != 1) {
            return Err(not_kulikov(format!("chain double curve {} has genus {}, not 1", c.id, c.genus)));
        }
        let last = order.len() - 1;
        for (pos, id) in order.iter().enumerate() {
            let c = &self.components[id];
            let end = pos == 0 || pos == last;
            let (want_kind, want_b1, label) = if end {
                (SurfaceKind::Rational, 0, "end")
            } else {
                (SurfaceKind::EllipticRuled, 2, "interior")
            };
            if let Some(kind) = c.kind {
                if kind != want_kind {
                    return Err(not_kulikov(format!("{label} component {id} is tagged {kind:?}, not {want_kind:?}")));
                }
            }
            if c.b1 != want_b1 {
                return Err(not_kulikov(format!("{label} component {id} has b1 = {}, not {want_b1}", c.b1)));
            }
        }
        Ok(KulikovType::II)
    }

    fn check_type_iii(&self) -> Result<KulikovType, SncError> {
        for c in self.components.values() {
            if let Some(kind) = c.kind {
                if kind != SurfaceKind::Rational {
                    return Err(not_kulikov(format!("component {} is tagged {kind:?}, not rational", c.id)));
                }
            }
            if c.b1 != 0 {
                return Err(not_kulikov(format!("component {} has b1 = {}, not 0", c.id, c.b1)));
            }
        }
        if let Some(c) = self.curves.values().find(|c| c.genus != 0) {
            return Err(not_kulikov(format!("double curve {} has genus {}, not 0", c.id, c.genus)));
        }
        match self.dual_complex().is_sphere_triangulation() {
            SphereCheck { is_sphere: true, .. } => Ok(KulikovType::III),
            SphereCheck { failure, .. } => Err(not_kulikov(format!(
                "dual complex is not a triangulated 2-sphere: {}",
                failure.map(|f| f.to_string()).unwrap_or_default()
            ))),
        }
    }

    pub fn strata_betti(&self) -> Result<StrataBetti, SncError> {
        let n = self.components.len() as u64;
        let b1: u64 = self.components.values().map(|c| c.b1 as u64).sum();
        let mut b2 = 0u64;
        for c in self.components.values() {
            b2 += c.b2.ok_or(SncError::MissingBetti(c.id))? as u64;
        }
        let nc = self.curves.len() as u64;
        let genus2: u64 = self.curves.values().map(|c| 2 * c.genus as u64).sum();
        Ok(StrataBetti {
            surfaces: [n, b1, b2, b1, n],
            curves: [nc, genus2, nc],
            points: self.triple_points.len() as u64,
        })
    }

    /// `E_1^{p,q} = ⊕_{i >= max(0,-p)} H^{q-2i}(X^(p+2i))(-i)` in dimensions.
    pub fn e1_page(&self) -> Result<E1Page, SncError> {
        let strata = self.strata_betti()?;
        let mut page = [[0u64; 5]; 5];
        for p in -2i32..=2 {
            for q in 0i32..=4 {
                let mut dim = 0;
                let mut i = (-p).max(0);
                while p + 2 * i <= 2 {
                    dim += strata.get(p + 2 * i, q - 2 * i);
                    i += 1;
                }
                page[(p + 2) as usize][q as usize] = dim;
            }
        }
        Ok(E1Page(page))
    }

    pub fn crosscheck(&self) -> Result<CrosscheckReport, SncError> {
        let t = self.classify()?;
        let grw = grw_dims(t);
        let h2 = self.dual_complex().homology_dims().h2;
        let mut checks = vec![
            CheckResult {
                name: "grw_symmetric".into(),
                passed: grw.is_symmetric(),
                detail: format!("{:?}", grw.0),
            },
            CheckResult {
                name: "grw_total_22".into(),
                passed: grw.total() == 22,
                detail: format!("total {}", grw.total()),
            },
            CheckResult {
                name: "top_weight_equals_dual_h2".into(),
                passed: grw.0[4] as usize == h2,
                detail: format!("gr4 = {}, h2 = {h2}", grw.0[4]),
            },
            CheckResult {
                name: "bottom_weight_equals_dual_h2".into(),
                passed: grw.0[0] as usize == h2,
                detail: format!("gr0 = {}, h2 = {h2}", grw.0[0]),
            },
        ];
        let expected_h2 = usize::from(t == KulikovType::III);
        checks.push(CheckResult {
            name: "dual_h2_matches_type".into(),
            passed: h2 == expected_h2,
            detail: format!("type {t}: h2 = {h2}, expected {expected_h2}"),
        });
        if let Ok(page) = self.e1_page() {
            let chi = page.euler_characteristic();
            checks.push(CheckResult {
                name: "e1_euler_characteristic_24".into(),
                passed: chi == 24,
                detail: format!("chi = {chi}"),
            });
        }
        Ok(CrosscheckReport { kulikov_type: t, grw, dual_h2: h2, checks })
    }
}
