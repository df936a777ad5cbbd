//! Bundled closed surfaces used by tests, benches and the CLI.

use std::f64::consts::FRAC_PI_2;

use crate::mesh::{Triangulation, WeightedMesh};

pub const TETRAHEDRON_FACES: [[usize; 3]; 4] = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];

pub const OCTAHEDRON_FACES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 1],
    [5, 2, 1],
    [5, 3, 2],
    [5, 4, 3],
    [5, 1, 4],
];

/// Simplicial genus-2 surface on 10 vertices (24 faces, 36 edges), consistently oriented.
pub const GENUS2_FACES: [[usize; 3]; 24] = [
    [0, 2, 3],
    [5, 3, 2],
    [0, 5, 4],
    [5, 0, 1],
    [2, 0, 4],
    [4, 1, 2],
    [0, 6, 1],
    [8, 1, 6],
    [6, 7, 8],
    [9, 7, 1],
    [1, 8, 9],
    [0, 8, 7],
    [7, 9, 0],
    [3, 9, 8],
    [8, 0, 3],
    [6, 0, 9],
    [9, 3, 6],
    [5, 1, 3],
    [1, 4, 3],
    [4, 6, 3],
    [7, 2, 1],
    [5, 6, 4],
    [5, 2, 6],
    [2, 7, 6],
];

pub fn tetrahedron() -> Triangulation {
    Triangulation::new(4, TETRAHEDRON_FACES.to_vec()).expect("tetrahedron is a closed surface")
}

pub fn octahedron() -> Triangulation {
    Triangulation::new(6, OCTAHEDRON_FACES.to_vec()).expect("octahedron is a closed surface")
}

/// Vertex 0 on top, 1..=5 upper ring, 6..=10 lower ring, 11 at the bottom.
pub fn icosahedron() -> Triangulation {
    let mut faces = Vec::with_capacity(20);
    for i in 0..5 {
        let (u0, u1) = (1 + i, 1 + (i + 1) % 5);
        let (l0, l1) = (6 + i, 6 + (i + 1) % 5);
        faces.push([0, u0, u1]);
        faces.push([u0, l0, u1]);
        faces.push([u1, l0, l1]);
        faces.push([11, l1, l0]);
    }
    Triangulation::new(12, faces).expect("icosahedron is a closed surface")
}

pub fn genus2() -> Triangulation {
    Triangulation::new(10, GENUS2_FACES.to_vec()).expect("genus-2 fixture is a closed surface")
}

/// Two triangles on a single vertex glued into a torus: every edge is a loop.
pub fn one_vertex_torus() -> Triangulation {
    Triangulation::new(1, vec![[0, 0, 0], [0, 0, 0]]).expect("one-vertex torus is a closed surface")
}

pub fn weighted(t: Triangulation, phi: f64) -> WeightedMesh {
    WeightedMesh::uniform(t, phi).expect("uniform weight within [0, pi/2]")
}

/// Octahedron with three faces around vertex 0 stellated (new vertices 6, 7, 8)
/// and right-angle weights on the sides of every stellated face.
///
/// Each new vertex has degree 3 with all three opposite edges at `pi/2`, which
/// violates the Euclidean existence condition for N = 9, so no constant
/// curvature packing exists.
pub fn obstructed_octahedron() -> WeightedMesh {
    let mut faces: Vec<[usize; 3]> = OCTAHEDRON_FACES[3..].to_vec();
    let stellated = &OCTAHEDRON_FACES[..3];
    for (k, f) in stellated.iter().enumerate() {
        let c = 6 + k;
        faces.push([f[0], f[1], c]);
        faces.push([f[1], f[2], c]);
        faces.push([f[2], f[0], c]);
    }
    let t = Triangulation::new(9, faces).expect("stellated octahedron is a closed surface");
    let is_stellated_side = |a: usize, b: usize| {
        stellated.iter().any(|f| f.contains(&a) && f.contains(&b))
    };
    let weights = t
        .edges()
        .iter()
        .map(|e| if is_stellated_side(e.ends[0], e.ends[1]) { FRAC_PI_2 } else { 0.0 })
        .collect();
    WeightedMesh::new(t, weights).expect("weights within [0, pi/2]")
}

/// Named weighted fixtures, in the order they are written to disk.
pub fn catalog() -> Vec<(&'static str, WeightedMesh)> {
    vec![
        ("tetrahedron", weighted(tetrahedron(), 0.0)),
        ("octahedron", weighted(octahedron(), 0.0)),
        ("octahedron_right", weighted(octahedron(), FRAC_PI_2)),
        ("icosahedron", weighted(icosahedron(), 0.0)),
        ("genus2", weighted(genus2(), 0.0)),
        ("obstructed_octahedron", obstructed_octahedron()),
        ("torus1", weighted(one_vertex_torus(), 0.0)),
    ]
}

/// Perturbed tetrahedron radii used throughout the convergence experiments.
pub const PERTURBED_TETRA_RADII: [f64; 4] = [1.2, 0.9, 1.0, 0.95];
