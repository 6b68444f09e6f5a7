//! Two-dimensional Δ-complexes: rational homology, recognition of
//! triangulated 2-spheres, orientations, and the sign by which a symmetry of
//! a closed oriented surface acts on its fundamental class.
//!
//! Edges carry explicit ids, so several edges may join the same two vertices
//! and several triangles may share the same vertex triple. Each edge has a
//! direction `v[0] → v[1]`.
//!
//! A triangle lists its corners `vertices = [v0, v1, v2]` in cyclic order and
//! its sides positionally: `edges[i]` joins `vertices[i]` to
//! `vertices[(i + 1) % 3]`. Its boundary is `Σ signs[i] · edges[i]`, where
//! `signs[i]` is `+1` when the edge runs in the side's direction. Signs are
//! derived from the vertices; they only need to be supplied for loops. When
//! no signs are supplied and the sides are not positional, the edges are
//! matched to the sides by the first permutation that fits.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(TriangleId, "t");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualComplexError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("duplicate triangle id {0}")]
    DuplicateTriangle(TriangleId),
    #[error("edge {edge} uses unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("triangle {triangle} uses unknown edge {edge}")]
    UnknownEdge { triangle: TriangleId, edge: EdgeId },
    #[error("triangle {0}: edges do not bound the listed vertices")]
    IncompatibleTriangle(TriangleId),
    #[error("triangle {0}: a loop side needs an explicit sign")]
    AmbiguousLoopSide(TriangleId),
    #[error("triangle {0}: signs must be +1 or -1")]
    BadSign(TriangleId),
    #[error("edge {edge} lies on {count} triangle sides, expected 2")]
    NotClosed { edge: EdgeId, count: usize },
    #[error("triangles do not form a single connected piece")]
    NotConnected,
    #[error("complex has no triangles")]
    NoTriangles,
    #[error("complex is not orientable")]
    NonOrientable,
    #[error("automorphism: {0}")]
    BadAutomorphism(String),
}

/// Input form of an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub v: [VertexId; 2],
}

/// Input form of a triangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub id: TriangleId,
    pub edges: [EdgeId; 3],
    pub vertices: [VertexId; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<[i8; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaComplexRaw {
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub triangles: Vec<Triangle>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Face {
    vertices: [VertexId; 3],
    edges: [EdgeId; 3],
    signs: [i8; 3],
}

/// A validated Δ-complex of dimension at most two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DeltaComplexRaw", into = "DeltaComplexRaw")]
pub struct DeltaComplex {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, [VertexId; 2]>,
    faces: BTreeMap<TriangleId, Face>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyDims {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
}

impl HomologyDims {
    pub fn euler_characteristic(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }
}

/// First condition a complex fails on the way to being a 2-sphere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum SphereFailure {
    Empty,
    IsolatedVertex { vertex: VertexId },
    Disconnected { components: usize },
    EdgeNotOnTwoTriangles { edge: EdgeId, count: usize },
    VertexLinkNotCycle { vertex: VertexId },
    NonOrientable,
    EulerCharacteristic { chi: i64 },
}

impl fmt::Display for SphereFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereFailure::Empty => write!(f, "complex is empty"),
            SphereFailure::IsolatedVertex { vertex } => write!(f, "vertex {vertex} is isolated"),
            SphereFailure::Disconnected { components } => {
                write!(f, "complex has {components} connected components")
            }
            SphereFailure::EdgeNotOnTwoTriangles { edge, count } => {
                write!(f, "edge {edge} lies on {count} triangle sides, not 2")
            }
            SphereFailure::VertexLinkNotCycle { vertex } => {
                write!(f, "link of vertex {vertex} is not a single cycle")
            }
            SphereFailure::NonOrientable => write!(f, "complex is not orientable"),
            SphereFailure::EulerCharacteristic { chi } => {
                write!(f, "Euler characteristic is {chi}, not 2")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereCheck {
    pub is_sphere: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<SphereFailure>,
}

impl SphereCheck {
    fn pass() -> Self {
        SphereCheck { is_sphere: true, failure: None }
    }

    fn fail(f: SphereFailure) -> Self {
        SphereCheck { is_sphere: false, failure: Some(f) }
    }
}

/// A sign per triangle making the signed sum of triangles a cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Orientation(pub BTreeMap<TriangleId, i8>);

impl Orientation {
    pub fn negated(&self) -> Orientation {
        Orientation(self.0.iter().map(|(&t, &s)| (t, -s)).collect())
    }

    pub fn sign(&self, t: TriangleId) -> i8 {
        self.0[&t]
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

fn perm_parity(p: [usize; 3]) -> i8 {
    let inversions = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn side_sign(edge: [VertexId; 2], from: VertexId, to: VertexId, given: Option<i8>) -> Option<Option<i8>> {
    // Some(Some(s)) matched with sign s, Some(None) matched a loop with no sign, None no match
    match given {
        Some(1) => (edge == [from, to]).then_some(Some(1)),
        Some(-1) => (edge == [to, from]).then_some(Some(-1)),
        Some(_) => None,
        None if from == to => (edge == [from, to]).then_some(None),
        None if edge == [from, to] => Some(Some(1)),
        None if edge == [to, from] => Some(Some(-1)),
        None => None,
    }
}

impl TryFrom<DeltaComplexRaw> for DeltaComplex {
    type Error = DualComplexError;

    fn try_from(raw: DeltaComplexRaw) -> Result<Self, DualComplexError> {
        DeltaComplex::new(raw.vertices, raw.edges, raw.triangles)
    }
}

impl From<DeltaComplex> for DeltaComplexRaw {
    fn from(c: DeltaComplex) -> Self {
        DeltaComplexRaw {
            vertices: c.vertices.iter().copied().collect(),
            edges: c.edges.iter().map(|(&id, &v)| Edge { id, v }).collect(),
            triangles: c
                .faces
                .iter()
                .map(|(&id, f)| {
                    let loops = (0..3).any(|i| f.vertices[i] == f.vertices[(i + 1) % 3]);
                    Triangle {
                        id,
                        edges: f.edges,
                        vertices: f.vertices,
                        signs: loops.then_some(f.signs),
                    }
                })
                .collect(),
        }
    }
}

impl DeltaComplex {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
        triangles: impl IntoIterator<Item = Triangle>,
    ) -> Result<Self, DualComplexError> {
        let mut vset = BTreeSet::new();
        for v in vertices {
            if !vset.insert(v) {
                return Err(DualComplexError::DuplicateVertex(v));
            }
        }
        let mut emap = BTreeMap::new();
        for e in edges {
            for &vertex in &e.v {
                if !vset.contains(&vertex) {
                    return Err(DualComplexError::UnknownVertex { edge: e.id, vertex });
                }
            }
            if emap.insert(e.id, e.v).is_some() {
                return Err(DualComplexError::DuplicateEdge(e.id));
            }
        }
        let mut faces = BTreeMap::new();
        for t in triangles {
            for &edge in &t.edges {
                if !emap.contains_key(&edge) {
                    return Err(DualComplexError::UnknownEdge { triangle: t.id, edge });
                }
            }
            if let Some(signs) = t.signs {
                if signs.iter().any(|&s| s != 1 && s != -1) {
                    return Err(DualComplexError::BadSign(t.id));
                }
            }
            let face = Self::resolve_face(&emap, &t)?;
            if faces.insert(t.id, face).is_some() {
                return Err(DualComplexError::DuplicateTriangle(t.id));
            }
        }
        Ok(DeltaComplex { vertices: vset, edges: emap, faces })
    }

    fn resolve_face(emap: &BTreeMap<EdgeId, [VertexId; 2]>, t: &Triangle) -> Result<Face, DualComplexError> {
        let perms: &[[usize; 3]] = if t.signs.is_some() { &PERMS[..1] } else { &PERMS };
        let mut saw_loop = false;
        for p in perms {
            let edges = [t.edges[p[0]], t.edges[p[1]], t.edges[p[2]]];
            let mut signs = [0i8; 3];
            let mut ok = true;
            for i in 0..3 {
                let given = t.signs.map(|s| s[i]);
                match side_sign(emap[&edges[i]], t.vertices[i], t.vertices[(i + 1) % 3], given) {
                    Some(Some(s)) => signs[i] = s,
                    Some(None) => {
                        saw_loop = true;
                        ok = false;
                    }
                    None => ok = false,
                }
                if !ok {
                    break;
                }
            }
            if ok {
                return Ok(Face { vertices: t.vertices, edges, signs });
            }
        }
        if saw_loop {
            Err(DualComplexError::AmbiguousLoopSide(t.id))
        } else {
            Err(DualComplexError::IncompatibleTriangle(t.id))
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn triangle_ids(&self) -> impl Iterator<Item = TriangleId> + '_ {
        self.faces.keys().copied()
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> Option<[VertexId; 2]> {
        self.edges.get(&e).copied()
    }

    pub fn triangle_vertices(&self, t: TriangleId) -> Option<[VertexId; 3]> {
        self.faces.get(&t).map(|f| f.vertices)
    }

    /// Sides of `t` in positional order with their boundary signs.
    pub fn triangle_sides(&self, t: TriangleId) -> Option<[(EdgeId, i8); 3]> {
        self.faces
            .get(&t)
            .map(|f| [(f.edges[0], f.signs[0]), (f.edges[1], f.signs[1]), (f.edges[2], f.signs[2])])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.faces.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    fn boundary_1(&self) -> Vec<Vec<BigInt>> {
        let vidx: BTreeMap<VertexId, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut m = vec![vec![BigInt::from(0); self.edges.len()]; self.vertices.len()];
        for (j, [a, b]) in self.edges.values().enumerate() {
            m[vidx[b]][j] += 1;
            m[vidx[a]][j] -= 1;
        }
        m
    }

    fn boundary_2(&self) -> Vec<Vec<BigInt>> {
        let eidx: BTreeMap<EdgeId, usize> = self.edges.keys().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut m = vec![vec![BigInt::from(0); self.faces.len()]; self.edges.len()];
        for (j, f) in self.faces.values().enumerate() {
            for i in 0..3 {
                m[eidx[&f.edges[i]]][j] += f.signs[i];
            }
        }
        m
    }

    /// Betti numbers over `Q` from the ranks of the two boundary maps.
    pub fn homology_dims(&self) -> HomologyDims {
        let r1 = linalg::rank(&self.boundary_1());
        let r2 = linalg::rank(&self.boundary_2());
        HomologyDims {
            h0: self.vertex_count() - r1,
            h1: self.edge_count() - r1 - r2,
            h2: self.triangle_count() - r2,
        }
    }

    fn vertex_components(&self) -> usize {
        let idx: BTreeMap<VertexId, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(idx.len());
        for [a, b] in self.edges.values() {
            uf.union(idx[a], idx[b]);
        }
        uf.count()
    }

    /// Sides each edge appears on, as `(triangle, position)`.
    fn edge_incidences(&self) -> BTreeMap<EdgeId, Vec<(TriangleId, usize)>> {
        let mut inc: BTreeMap<EdgeId, Vec<(TriangleId, usize)>> =
            self.edges.keys().map(|&e| (e, Vec::new())).collect();
        for (&t, f) in &self.faces {
            for (i, e) in f.edges.iter().enumerate() {
                inc.get_mut(e).expect("validated").push((t, i));
            }
        }
        inc
    }

    fn link_is_cycle(&self, v: VertexId) -> bool {
        // nodes: edge ends sitting at v; arcs: triangle corners at v
        let mut nodes: BTreeMap<(EdgeId, usize), usize> = BTreeMap::new();
        for (&e, ends) in &self.edges {
            for (k, &w) in ends.iter().enumerate() {
                if w == v {
                    let n = nodes.len();
                    nodes.insert((e, k), n);
                }
            }
        }
        if nodes.is_empty() {
            return false;
        }
        let mut degree = vec![0usize; nodes.len()];
        let mut uf = UnionFind::new(nodes.len());
        for f in self.faces.values() {
            for i in 0..3 {
                if f.vertices[i] != v {
                    continue;
                }
                let out = (f.edges[i], if f.signs[i] > 0 { 0 } else { 1 });
                let prev = (i + 2) % 3;
                let inc = (f.edges[prev], if f.signs[prev] > 0 { 1 } else { 0 });
                let (a, b) = (nodes[&out], nodes[&inc]);
                degree[a] += 1;
                degree[b] += 1;
                uf.union(a, b);
            }
        }
        degree.iter().all(|&d| d == 2) && uf.count() == 1
    }

    /// Decides whether the complex triangulates the 2-sphere; on failure the
    /// diagnostic names the first condition that does not hold.
    pub fn is_sphere_triangulation(&self) -> SphereCheck {
        if self.vertices.is_empty() {
            return SphereCheck::fail(SphereFailure::Empty);
        }
        let mut touched = BTreeSet::new();
        for [a, b] in self.edges.values() {
            touched.insert(*a);
            touched.insert(*b);
        }
        if let Some(&vertex) = self.vertices.iter().find(|v| !touched.contains(v)) {
            return SphereCheck::fail(SphereFailure::IsolatedVertex { vertex });
        }
        let components = self.vertex_components();
        if components != 1 {
            return SphereCheck::fail(SphereFailure::Disconnected { components });
        }
        for (edge, sides) in self.edge_incidences() {
            if sides.len() != 2 {
                return SphereCheck::fail(SphereFailure::EdgeNotOnTwoTriangles { edge, count: sides.len() });
            }
        }
        if let Some(vertex) = self.vertices().find(|&v| !self.link_is_cycle(v)) {
            return SphereCheck::fail(SphereFailure::VertexLinkNotCycle { vertex });
        }
        if self.orient().is_err() {
            return SphereCheck::fail(SphereFailure::NonOrientable);
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            return SphereCheck::fail(SphereFailure::EulerCharacteristic { chi });
        }
        SphereCheck::pass()
    }

    /// Orients a connected closed pseudo-surface by breadth-first propagation
    /// from the lowest-numbered triangle, which receives `+1`.
    pub fn orient(&self) -> Result<Orientation, DualComplexError> {
        let Some(&seed) = self.faces.keys().next() else {
            return Err(DualComplexError::NoTriangles);
        };
        let inc = self.edge_incidences();
        for (&edge, sides) in &inc {
            if sides.len() != 2 {
                return Err(DualComplexError::NotClosed { edge, count: sides.len() });
            }
        }
        let mut sign: BTreeMap<TriangleId, i8> = BTreeMap::new();
        sign.insert(seed, 1);
        let mut queue = VecDeque::from([seed]);
        while let Some(t) = queue.pop_front() {
            let f = &self.faces[&t];
            let st = sign[&t];
            for i in 0..3 {
                let sides = &inc[&f.edges[i]];
                let (u, j) = if sides[0] == (t, i) { sides[1] } else { sides[0] };
                let su = self.faces[&u].signs[j];
                // the two appearances of the edge must cancel
                let want = -st * f.signs[i] * su;
                match sign.get(&u) {
                    Some(&s) if s != want => return Err(DualComplexError::NonOrientable),
                    Some(_) => {}
                    None => {
                        sign.insert(u, want);
                        queue.push_back(u);
                    }
                }
            }
        }
        if sign.len() != self.faces.len() {
            return Err(DualComplexError::NotConnected);
        }
        Ok(Orientation(sign))
    }

    /// True when `Σ signs[t] · t` has zero boundary.
    pub fn is_cycle(&self, chain: &Orientation) -> bool {
        let mut coeff: BTreeMap<EdgeId, i64> = BTreeMap::new();
        for (t, f) in &self.faces {
            let c = chain.0.get(t).copied().unwrap_or(0) as i64;
            for i in 0..3 {
                *coeff.entry(f.edges[i]).or_default() += c * f.signs[i] as i64;
            }
        }
        coeff.values().all(|&c| c == 0)
    }

    /// The `ε = ±1` with `g_*[X] = ε [X]` for the fundamental class `[X]`.
    pub fn orientation_action(&self, g: &ComplexAutomorphism) -> Result<i8, DualComplexError> {
        g.validate(self)?;
        let orientation = self.orient()?;
        let mut eps = None;
        for (&t, f) in &self.faces {
            let image = g.triangles[&t];
            let parity = self.corner_permutation_parity(g, f, &self.faces[&image])?;
            let e = orientation.sign(t) * parity * orientation.sign(image);
            match eps {
                None => eps = Some(e),
                Some(prev) if prev != e => {
                    return Err(DualComplexError::BadAutomorphism(
                        "induced map on triangles is not a chain map".into(),
                    ))
                }
                Some(_) => {}
            }
        }
        Ok(eps.expect("orient guarantees a triangle"))
    }

    /// Parity of the permutation carrying the corners of `f` onto those of
    /// its image; sides must follow the corners.
    fn corner_permutation_parity(&self, g: &ComplexAutomorphism, f: &Face, image: &Face) -> Result<i8, DualComplexError> {
        let mut parities = BTreeSet::new();
        for p in PERMS {
            let corners_ok = (0..3).all(|i| g.vertices[&f.vertices[i]] == image.vertices[p[i]]);
            if !corners_ok {
                continue;
            }
            let sides_ok = (0..3).all(|i| {
                let (a, b) = (p[i], p[(i + 1) % 3]);
                let j = if (a + 1) % 3 == b { a } else { b };
                g.edges[&f.edges[i]] == image.edges[j]
            });
            if sides_ok {
                parities.insert(perm_parity(p));
            }
        }
        match parities.len() {
            1 => Ok(*parities.iter().next().expect("one element")),
            0 => Err(DualComplexError::BadAutomorphism("triangle boundary not preserved".into())),
            _ => Err(DualComplexError::BadAutomorphism("ambiguous corner correspondence".into())),
        }
    }
}

/// A symmetry of a [`DeltaComplex`], given on all three kinds of cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexAutomorphism {
    pub vertices: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
    pub triangles: BTreeMap<TriangleId, TriangleId>,
}

fn is_bijection_on<K: Ord + Copy>(map: &BTreeMap<K, K>, domain: &BTreeSet<K>) -> bool {
    map.len() == domain.len()
        && map.keys().all(|k| domain.contains(k))
        && map.values().copied().collect::<BTreeSet<K>>() == *domain
}

impl ComplexAutomorphism {
    pub fn identity(c: &DeltaComplex) -> Self {
        ComplexAutomorphism {
            vertices: c.vertices().map(|v| (v, v)).collect(),
            edges: c.edge_ids().map(|e| (e, e)).collect(),
            triangles: c.triangle_ids().map(|t| (t, t)).collect(),
        }
    }

    /// Extends a vertex permutation to edges and triangles. Works when no two
    /// edges share an endpoint pair and no two triangles a vertex set, as in
    /// a simplicial complex.
    pub fn from_vertex_map(c: &DeltaComplex, vertices: BTreeMap<VertexId, VertexId>) -> Result<Self, DualComplexError> {
        let bad = |m: &str| DualComplexError::BadAutomorphism(m.to_string());
        let vset: BTreeSet<VertexId> = c.vertices().collect();
        if !is_bijection_on(&vertices, &vset) {
            return Err(bad("vertex map is not a bijection"));
        }
        let key2 = |a: VertexId, b: VertexId| if a <= b { (a, b) } else { (b, a) };
        let mut by_pair: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
        for (&e, &[a, b]) in &c.edges {
            by_pair.entry(key2(a, b)).or_default().push(e);
        }
        let mut edges = BTreeMap::new();
        for (&e, &[a, b]) in &c.edges {
            match by_pair.get(&key2(vertices[&a], vertices[&b])).map(Vec::as_slice) {
                Some([img]) => {
                    edges.insert(e, *img);
                }
                Some(_) => return Err(bad("edge image ambiguous")),
                None => return Err(bad("edge has no image")),
            }
        }
        let mut by_set: BTreeMap<BTreeSet<VertexId>, Vec<TriangleId>> = BTreeMap::new();
        for (&t, f) in &c.faces {
            by_set.entry(f.vertices.iter().copied().collect()).or_default().push(t);
        }
        let mut triangles = BTreeMap::new();
        for (&t, f) in &c.faces {
            let image: BTreeSet<VertexId> = f.vertices.iter().map(|v| vertices[v]).collect();
            match by_set.get(&image).map(Vec::as_slice) {
                Some([img]) => {
                    triangles.insert(t, *img);
                }
                Some(_) => return Err(bad("triangle image ambiguous")),
                None => return Err(bad("triangle has no image")),
            }
        }
        let g = ComplexAutomorphism { vertices, edges, triangles };
        g.validate(c)?;
        Ok(g)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ComplexAutomorphism) -> ComplexAutomorphism {
        fn chain<K: Ord + Copy>(outer: &BTreeMap<K, K>, inner: &BTreeMap<K, K>) -> BTreeMap<K, K> {
            inner.iter().map(|(&k, v)| (k, outer[v])).collect()
        }
        ComplexAutomorphism {
            vertices: chain(&self.vertices, &other.vertices),
            edges: chain(&self.edges, &other.edges),
            triangles: chain(&self.triangles, &other.triangles),
        }
    }

    /// Checks bijectivity and compatibility with edge endpoints and triangle
    /// corners.
    pub fn validate(&self, c: &DeltaComplex) -> Result<(), DualComplexError> {
        let bad = |m: String| DualComplexError::BadAutomorphism(m);
        if !is_bijection_on(&self.vertices, &c.vertices) {
            return Err(bad("vertex map is not a bijection".into()));
        }
        if !is_bijection_on(&self.edges, &c.edges.keys().copied().collect()) {
            return Err(bad("edge map is not a bijection".into()));
        }
        if !is_bijection_on(&self.triangles, &c.faces.keys().copied().collect()) {
            return Err(bad("triangle map is not a bijection".into()));
        }
        for (e, &[a, b]) in &c.edges {
            let [x, y] = c.edges[&self.edges[e]];
            let (ga, gb) = (self.vertices[&a], self.vertices[&b]);
            if !((x == ga && y == gb) || (x == gb && y == ga)) {
                return Err(bad(format!("edge {e} endpoints not preserved")));
            }
        }
        for (t, f) in &c.faces {
            let image = &c.faces[&self.triangles[t]];
            let mut want: Vec<VertexId> = f.vertices.iter().map(|v| self.vertices[v]).collect();
            let mut got = image.vertices.to_vec();
            want.sort();
            got.sort();
            let mut want_e: Vec<EdgeId> = f.edges.iter().map(|e| self.edges[e]).collect();
            let mut got_e = image.edges.to_vec();
            want_e.sort();
            got_e.sort();
            if want != got || want_e != got_e {
                return Err(bad(format!("triangle {t} incidence not preserved")));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Builds a simplicial complex from vertex triples: vertices and edges are
/// numbered in sorted order, triangles in input order.
pub fn simplicial_from_triangles(triangles: &[[u32; 3]]) -> Result<DeltaComplex, DualComplexError> {
    let mut verts = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for t in triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            verts.insert(a);
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let eid: BTreeMap<(u32, u32), EdgeId> = pairs.iter().enumerate().map(|(i, &p)| (p, EdgeId(i as u32))).collect();
    let edges = eid.iter().map(|(&(a, b), &id)| Edge { id, v: [VertexId(a), VertexId(b)] });
    let tris = triangles.iter().enumerate().map(|(k, t)| Triangle {
        id: TriangleId(k as u32),
        edges: [0, 1, 2].map(|i| {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            eid[&(a.min(b), a.max(b))]
        }),
        vertices: t.map(VertexId),
        signs: None,
    });
    DeltaComplex::new(verts.into_iter().map(VertexId), edges, tris)
}

/// Boundary of the tetrahedron on vertices 0..4.
pub fn tetrahedron_boundary() -> DeltaComplex {
    simplicial_from_triangles(&[[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]]).expect("valid")
}

/// Boundary of the octahedron; vertex `2k` is antipodal to `2k + 1`.
pub fn octahedron_boundary() -> DeltaComplex {
    let mut tris = Vec::new();
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                tris.push([x, y, z]);
            }
        }
    }
    simplicial_from_triangles(&tris).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn edge(id: u32, a: u32, b: u32) -> Edge {
        Edge { id: EdgeId(id), v: [v(a), v(b)] }
    }

    fn tri(id: u32, edges: [u32; 3], vertices: [u32; 3], signs: Option<[i8; 3]>) -> Triangle {
        Triangle { id: TriangleId(id), edges: edges.map(EdgeId), vertices: vertices.map(VertexId), signs }
    }

    /// Two vertices, three edges, two triangles; `c` is a loop.
    pub(crate) fn projective_plane() -> DeltaComplex {
        DeltaComplex::new(
            [v(0), v(1)],
            [edge(0, 0, 1), edge(1, 0, 1), edge(2, 0, 0)],
            [
                tri(0, [0, 1, 2], [0, 1, 0], Some([1, -1, -1])),
                tri(1, [2, 0, 1], [0, 0, 1], Some([1, 1, -1])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn point_and_segment() {
        let pt = DeltaComplex::new([v(0)], [], []).unwrap();
        assert_eq!(pt.homology_dims(), HomologyDims { h0: 1, h1: 0, h2: 0 });
        let seg = DeltaComplex::new([v(0), v(1)], [edge(0, 0, 1)], []).unwrap();
        assert_eq!(seg.homology_dims(), HomologyDims { h0: 1, h1: 0, h2: 0 });
        assert_eq!(
            pt.is_sphere_triangulation().failure,
            Some(SphereFailure::IsolatedVertex { vertex: v(0) })
        );
    }

    #[test]
    fn tetrahedron_homology_and_sphere() {
        let t = tetrahedron_boundary();
        assert_eq!((t.vertex_count(), t.edge_count(), t.triangle_count()), (4, 6, 4));
        assert_eq!(t.homology_dims(), HomologyDims { h0: 1, h1: 0, h2: 1 });
        assert_eq!(t.is_sphere_triangulation(), SphereCheck::pass());
    }

    #[test]
    fn single_triangle_is_not_closed() {
        let c = simplicial_from_triangles(&[[0, 1, 2]]).unwrap();
        let check = c.is_sphere_triangulation();
        assert!(!check.is_sphere);
        assert!(matches!(check.failure, Some(SphereFailure::EdgeNotOnTwoTriangles { count: 1, .. })));
        assert!(matches!(c.orient(), Err(DualComplexError::NotClosed { count: 1, .. })));
    }

    #[test]
    fn wedge_of_tetrahedra_fails_at_link() {
        let c = simplicial_from_triangles(&[
            [0, 1, 2],
            [0, 3, 1],
            [1, 3, 2],
            [0, 2, 3],
            [0, 4, 5],
            [0, 6, 4],
            [4, 6, 5],
            [0, 5, 6],
        ])
        .unwrap();
        assert_eq!(
            c.is_sphere_triangulation().failure,
            Some(SphereFailure::VertexLinkNotCycle { vertex: v(0) })
        );
        assert_eq!(c.homology_dims(), HomologyDims { h0: 1, h1: 0, h2: 2 });
    }

    #[test]
    fn two_disjoint_spheres() {
        let c = simplicial_from_triangles(&[
            [0, 1, 2],
            [0, 3, 1],
            [1, 3, 2],
            [0, 2, 3],
            [4, 5, 6],
            [4, 7, 5],
            [5, 7, 6],
            [4, 6, 7],
        ])
        .unwrap();
        assert_eq!(
            c.is_sphere_triangulation().failure,
            Some(SphereFailure::Disconnected { components: 2 })
        );
    }

    #[test]
    fn torus_fails_euler_characteristic() {
        // 7-vertex torus
        let mut tris = Vec::new();
        for i in 0..7u32 {
            tris.push([i, (i + 1) % 7, (i + 3) % 7]);
            tris.push([i, (i + 3) % 7, (i + 2) % 7]);
        }
        let c = simplicial_from_triangles(&tris).unwrap();
        assert_eq!(c.homology_dims(), HomologyDims { h0: 1, h1: 2, h2: 1 });
        assert_eq!(
            c.is_sphere_triangulation().failure,
            Some(SphereFailure::EulerCharacteristic { chi: 0 })
        );
    }

    #[test]
    fn projective_plane_is_non_orientable() {
        let rp2 = projective_plane();
        assert_eq!(rp2.homology_dims(), HomologyDims { h0: 1, h1: 0, h2: 0 });
        assert_eq!(rp2.orient(), Err(DualComplexError::NonOrientable));
        assert_eq!(rp2.is_sphere_triangulation().failure, Some(SphereFailure::NonOrientable));
    }

    #[test]
    fn loop_side_without_sign_is_rejected() {
        let r = DeltaComplex::new([v(0), v(1)], [edge(0, 0, 1), edge(1, 0, 1), edge(2, 0, 0)], [tri(0, [0, 1, 2], [0, 1, 0], None)]);
        assert_eq!(r, Err(DualComplexError::AmbiguousLoopSide(TriangleId(0))));
    }

    #[test]
    fn tetrahedron_orientation_is_a_cycle() {
        let t = tetrahedron_boundary();
        let o = t.orient().unwrap();
        assert!(t.is_cycle(&o));
        assert!(t.is_cycle(&o.negated()));
        let mut broken = o.clone();
        broken.0.insert(TriangleId(0), -o.sign(TriangleId(0)));
        assert!(!t.is_cycle(&broken));
    }

    #[test]
    fn edges_in_any_order_are_matched_to_sides() {
        let a = DeltaComplex::new(
            [v(0), v(1), v(2)],
            [edge(0, 0, 1), edge(1, 1, 2), edge(2, 2, 0)],
            [tri(0, [2, 0, 1], [0, 1, 2], None)],
        )
        .unwrap();
        assert_eq!(a.triangle_sides(TriangleId(0)).unwrap(), [(EdgeId(0), 1), (EdgeId(1), 1), (EdgeId(2), 1)]);
        let bad = DeltaComplex::new(
            [v(0), v(1), v(2)],
            [edge(0, 0, 1), edge(1, 0, 1), edge(2, 2, 0)],
            [tri(0, [0, 1, 2], [0, 1, 2], None)],
        );
        assert_eq!(bad, Err(DualComplexError::IncompatibleTriangle(TriangleId(0))));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(DeltaComplex::new([v(0), v(0)], [], []), Err(DualComplexError::DuplicateVertex(v(0))));
        assert_eq!(
            DeltaComplex::new([v(0)], [edge(0, 0, 1)], []),
            Err(DualComplexError::UnknownVertex { edge: EdgeId(0), vertex: v(1) })
        );
        assert_eq!(
            DeltaComplex::new([v(0), v(1)], [edge(0, 0, 1), edge(0, 1, 0)], []),
            Err(DualComplexError::DuplicateEdge(EdgeId(0)))
        );
        assert_eq!(
            DeltaComplex::new([v(0), v(1)], [edge(0, 0, 1)], [tri(0, [0, 0, 9], [0, 1, 0], None)]),
            Err(DualComplexError::UnknownEdge { triangle: TriangleId(0), edge: EdgeId(9) })
        );
    }

    #[test]
    fn multi_edge_sphere() {
        // two triangles glued along their whole boundary
        let c = DeltaComplex::new(
            [v(0), v(1), v(2)],
            [edge(0, 0, 1), edge(1, 1, 2), edge(2, 2, 0)],
            [tri(0, [0, 1, 2], [0, 1, 2], None), tri(1, [0, 2, 1], [1, 0, 2], None)],
        )
        .unwrap();
        assert!(c.is_sphere_triangulation().is_sphere);
        // a bigon-style sphere: two vertices joined by two edges plus a third
        let two_faces_on_same_vertices = DeltaComplex::new(
            [v(0), v(1), v(2)],
            [edge(0, 0, 1), edge(1, 0, 1), edge(2, 1, 2), edge(3, 2, 0)],
            [
                tri(0, [0, 2, 3], [0, 1, 2], None),
                tri(1, [1, 2, 3], [0, 1, 2], None),
            ],
        )
        .unwrap();
        assert_eq!(
            two_faces_on_same_vertices.is_sphere_triangulation().failure,
            Some(SphereFailure::EdgeNotOnTwoTriangles { edge: EdgeId(0), count: 1 })
        );
    }

    fn vertex_perm(c: &DeltaComplex, p: &[u32]) -> ComplexAutomorphism {
        let map = p.iter().enumerate().map(|(i, &j)| (v(i as u32), v(j))).collect();
        ComplexAutomorphism::from_vertex_map(c, map).unwrap()
    }

    #[test]
    fn tetrahedron_actions() {
        let t = tetrahedron_boundary();
        assert_eq!(t.orientation_action(&ComplexAutomorphism::identity(&t)), Ok(1));
        assert_eq!(t.orientation_action(&vertex_perm(&t, &[1, 0, 2, 3])), Ok(-1));
        assert_eq!(t.orientation_action(&vertex_perm(&t, &[1, 2, 0, 3])), Ok(1));
    }

    #[test]
    fn octahedron_antipodal_map_reverses() {
        let o = octahedron_boundary();
        assert!(o.is_sphere_triangulation().is_sphere);
        assert_eq!(o.orientation_action(&vertex_perm(&o, &[1, 0, 3, 2, 5, 4])), Ok(-1));
        // rotation by a quarter turn about the z axis: x -> y -> -x
        assert_eq!(o.orientation_action(&vertex_perm(&o, &[2, 3, 1, 0, 4, 5])), Ok(1));
    }

    #[test]
    fn bad_automorphisms_rejected() {
        let t = tetrahedron_boundary();
        let mut g = ComplexAutomorphism::identity(&t);
        g.vertices.insert(v(0), v(1));
        assert!(matches!(t.orientation_action(&g), Err(DualComplexError::BadAutomorphism(_))));
        let mut g = ComplexAutomorphism::identity(&t);
        g.vertices.insert(v(0), v(1));
        g.vertices.insert(v(1), v(0));
        assert!(matches!(g.validate(&t), Err(DualComplexError::BadAutomorphism(_))));
        let square = simplicial_from_triangles(&[[0, 1, 2], [0, 2, 3]]).unwrap();
        let map = [(0, 1), (1, 0), (2, 2), (3, 3)].map(|(a, b)| (v(a), v(b))).into_iter().collect();
        assert!(ComplexAutomorphism::from_vertex_map(&square, map).is_err());
    }

    #[test]
    fn orientation_action_needs_closed_surface() {
        let c = simplicial_from_triangles(&[[0, 1, 2]]).unwrap();
        let id = ComplexAutomorphism::identity(&c);
        assert!(matches!(c.orientation_action(&id), Err(DualComplexError::NotClosed { .. })));
    }

    #[test]
    fn json_shape() {
        let js = r#"{"vertices":[0,1],"edges":[{"id":0,"v":[0,1]}],"triangles":[]}"#;
        let c: DeltaComplex = serde_json::from_str(js).unwrap();
        assert_eq!(c.edge_count(), 1);
        assert_eq!(serde_json::to_string(&c).unwrap(), js);
        let rp2 = projective_plane();
        let back: DeltaComplex = serde_json::from_str(&serde_json::to_string(&rp2).unwrap()).unwrap();
        assert_eq!(back, rp2);
        assert!(serde_json::from_str::<DeltaComplex>(r#"{"vertices":[0],"edges":[{"id":0,"v":[0,3]}]}"#).is_err());
    }
}
