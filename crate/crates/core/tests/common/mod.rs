#![allow(dead_code)]

use std::collections::BTreeMap;

use k3degen_core::dualcomplex::{
    simplicial_from_triangles, ComplexAutomorphism, DeltaComplex, Edge, EdgeId, Triangle, TriangleId, VertexId,
};
use k3degen_core::sncfiber::{Component, ComponentId, CurveId, DoubleCurve, SncSurface, SurfaceKind, TriplePoint};
use rand::seq::SliceRandom;
use rand::Rng;

/// Four rational surfaces meeting pairwise in lines, three at a time in points.
pub fn tetrahedral_fiber() -> SncSurface {
    let comps = (0..4).map(|i| Component { id: ComponentId(i), b1: 0, b2: Some(7), kind: Some(SurfaceKind::Rational) });
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let curves = pairs.iter().enumerate().map(|(k, &(a, b))| DoubleCurve {
        id: CurveId(k as u32),
        components: [ComponentId(a), ComponentId(b)],
        genus: 0,
    });
    let ix = |a: u32, b: u32| CurveId(pairs.iter().position(|&p| p == (a, b)).unwrap() as u32);
    let points = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        .map(|(a, b, c)| TriplePoint { curves: [ix(a, b), ix(b, c), ix(a, c)] });
    SncSurface::new(comps, curves, points).unwrap()
}

pub fn permutations(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sign of a permutation by counting inversions.
pub fn parity(p: &[u32]) -> i8 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn vertex_map(p: &[u32]) -> BTreeMap<VertexId, VertexId> {
    p.iter().enumerate().map(|(i, &j)| (VertexId(i as u32), VertexId(j))).collect()
}

/// All 48 symmetries of the octahedron as signed permutations of the axes.
pub fn octahedron_symmetries(c: &DeltaComplex) -> Vec<ComplexAutomorphism> {
    let mut out = Vec::new();
    for axes in permutations(3) {
        for flips in 0..8u32 {
            let mut map = BTreeMap::new();
            for k in 0..3u32 {
                let target = axes[k as usize];
                let flip = (flips >> k) & 1;
                map.insert(VertexId(2 * k), VertexId(2 * target + flip));
                map.insert(VertexId(2 * k + 1), VertexId(2 * target + 1 - flip));
            }
            out.push(ComplexAutomorphism::from_vertex_map(c, map).unwrap());
        }
    }
    out
}

/// Sign of the octahedral symmetry on the oriented sphere: determinant of the
/// signed permutation matrix.
pub fn octahedral_det(g: &ComplexAutomorphism) -> i8 {
    let mut axes = Vec::new();
    let mut sign = 1;
    for k in 0..3u32 {
        let img = g.vertices[&VertexId(2 * k)].0;
        axes.push(img / 2);
        if img % 2 == 1 {
            sign = -sign;
        }
    }
    sign * parity(&axes)
}

/// A Δ-complex with loops, parallel edges and isolated cells allowed.
pub fn random_complex<R: Rng>(rng: &mut R) -> DeltaComplex {
    let nv = rng.gen_range(1..=6u32);
    let ne = rng.gen_range(0..=10u32);
    let edges: Vec<Edge> = (0..ne)
        .map(|i| Edge { id: EdgeId(i), v: [VertexId(rng.gen_range(0..nv)), VertexId(rng.gen_range(0..nv))] })
        .collect();
    let mut triangles = Vec::new();
    for _ in 0..rng.gen_range(0..=12) {
        let vs = [0, 0, 0].map(|_| VertexId(rng.gen_range(0..nv)));
        let mut side_edges = [EdgeId(0); 3];
        let mut signs = [0i8; 3];
        let mut ok = true;
        for i in 0..3 {
            let (a, b) = (vs[i], vs[(i + 1) % 3]);
            let fits: Vec<&Edge> = edges.iter().filter(|e| e.v == [a, b] || e.v == [b, a]).collect();
            let Some(e) = fits.choose(rng) else {
                ok = false;
                break;
            };
            side_edges[i] = e.id;
            signs[i] = if a == b {
                if rng.gen_bool(0.5) { 1 } else { -1 }
            } else if e.v == [a, b] {
                1
            } else {
                -1
            };
        }
        if ok {
            triangles.push(Triangle {
                id: TriangleId(triangles.len() as u32),
                edges: side_edges,
                vertices: vs,
                signs: Some(signs),
            });
        }
    }
    DeltaComplex::new((0..nv).map(VertexId), edges, triangles).expect("generated complex is valid")
}

/// Random stellar subdivisions of the tetrahedron boundary, relabelled.
pub fn random_sphere<R: Rng>(rng: &mut R, steps: usize) -> DeltaComplex {
    let mut tris: Vec<[u32; 3]> = vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]];
    let mut next = 4;
    for _ in 0..steps {
        let k = rng.gen_range(0..tris.len());
        let [a, b, c] = tris.swap_remove(k);
        tris.extend([[a, b, next], [b, c, next], [c, a, next]]);
        next += 1;
    }
    let mut labels: Vec<u32> = (0..next).collect();
    labels.shuffle(rng);
    let tris: Vec<[u32; 3]> = tris.iter().map(|t| t.map(|v| labels[v as usize] * 3 + 1)).collect();
    simplicial_from_triangles(&tris).unwrap()
}
