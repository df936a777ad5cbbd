//! Combinatorial topology of closed triangulated surfaces.
//!
//! Edges are identified positionally: every face side is an occurrence of the
//! unordered vertex pair it joins, occurrences of the same pair are sorted by
//! `(face, corner)` and glued two at a time. A simplicial surface has exactly
//! two occurrences per pair, so this only matters for generalized
//! triangulations where two vertices may be joined by several edges or a face
//! may repeat a vertex.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;

/// Default vertex cap for the brute-force existence check (2^N subsets).
pub const DEFAULT_ECON_CAP: usize = 20;

/// Strict inequalities in the existence condition are decided with this margin.
const ECON_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: weight out of range [0, pi/2] on edge {edge}: {phi}")]
    WeightOutOfRange { line: usize, edge: usize, phi: f64 },
    #[error("non-manifold edge between vertices {a} and {b}: {count} incident face sides")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("dangling vertex {0}: not used by any face")]
    DanglingVertex(usize),
    #[error("face {face} references vertex {vertex} but the mesh has {vertex_count} vertices")]
    VertexOutOfRange { face: usize, vertex: usize, vertex_count: usize },
    #[error("euler characteristic mismatch: declared {declared}, counted {counted}")]
    EulerMismatch { declared: i64, counted: i64 },
    #[error("mesh has no vertices or no faces")]
    Empty,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("subset must be a non-empty proper subset of the vertices")]
    ImproperSubset,
    #[error("vertex {vertex} out of range in subset (N = {vertex_count})")]
    SubsetVertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("existence check needs N <= {cap}, mesh has N = {n}; use numerical existence detection instead")]
    VertexCapExceeded { n: usize, cap: usize },
}

/// One incidence of an edge: the face and the corner of that face opposite the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FaceSlot {
    pub face: usize,
    pub corner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// Endpoint vertices, `ends[0] <= ends[1]`.
    pub ends: [usize; 2],
    pub slots: [FaceSlot; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangulation {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    /// `face_edges[f][c]` is the edge opposite corner `c` of face `f`.
    face_edges: Vec<[usize; 3]>,
    degrees: Vec<usize>,
}

impl Triangulation {
    pub fn new(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if vertex_count == 0 || faces.is_empty() {
            return Err(MeshError::Empty);
        }
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= vertex_count {
                    return Err(MeshError::VertexOutOfRange { face: f, vertex: v, vertex_count });
                }
            }
        }

        // (pair, face, corner) for every face side; sorted lexicographically.
        let mut sides: Vec<((usize, usize), usize, usize)> = Vec::with_capacity(3 * faces.len());
        for (f, face) in faces.iter().enumerate() {
            for c in 0..3 {
                let a = face[(c + 1) % 3];
                let b = face[(c + 2) % 3];
                sides.push(((a.min(b), a.max(b)), f, c));
            }
        }
        sides.sort_unstable();

        let mut edges = Vec::with_capacity(sides.len() / 2);
        let mut face_edges = vec![[usize::MAX; 3]; faces.len()];
        let mut start = 0;
        while start < sides.len() {
            let key = sides[start].0;
            let mut end = start;
            while end < sides.len() && sides[end].0 == key {
                end += 1;
            }
            let count = end - start;
            if count % 2 != 0 {
                return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1, count });
            }
            for pair in sides[start..end].chunks_exact(2) {
                let idx = edges.len();
                let slots = [
                    FaceSlot { face: pair[0].1, corner: pair[0].2 },
                    FaceSlot { face: pair[1].1, corner: pair[1].2 },
                ];
                for s in &slots {
                    face_edges[s.face][s.corner] = idx;
                }
                edges.push(Edge { ends: [key.0, key.1], slots });
            }
            start = end;
        }

        let mut degrees = vec![0usize; vertex_count];
        for e in &edges {
            degrees[e.ends[0]] += 1;
            degrees[e.ends[1]] += 1;
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(MeshError::DanglingVertex(v));
        }

        Ok(Triangulation { vertex_count, faces, edges, face_edges, degrees })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn face_edges(&self) -> &[[usize; 3]] {
        &self.face_edges
    }

    /// Number of incident edges per vertex (a loop edge counts twice).
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
}

/// `N - |E| + |F|`.
pub fn euler_characteristic(t: &Triangulation) -> i64 {
    t.vertex_count as i64 - t.edges.len() as i64 + t.faces.len() as i64
}

/// A triangulation with an intersection angle in `[0, pi/2]` on every edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedMesh {
    topology: Triangulation,
    weights: Vec<f64>,
}

impl WeightedMesh {
    pub fn new(topology: Triangulation, weights: Vec<f64>) -> Result<Self, MeshError> {
        if weights.len() != topology.edge_count() {
            return Err(MeshError::WeightCount { expected: topology.edge_count(), got: weights.len() });
        }
        for (edge, &phi) in weights.iter().enumerate() {
            if !(0.0..=FRAC_PI_2).contains(&phi) {
                return Err(MeshError::WeightOutOfRange { line: 0, edge, phi });
            }
        }
        Ok(WeightedMesh { topology, weights })
    }

    /// All weights set to the same angle.
    pub fn uniform(topology: Triangulation, phi: f64) -> Result<Self, MeshError> {
        let weights = vec![phi; topology.edge_count()];
        Self::new(topology, weights)
    }

    pub fn topology(&self) -> &Triangulation {
        &self.topology
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vertex_count(&self) -> usize {
        self.topology.vertex_count
    }
}

fn syntax(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Syntax { line, message: message.into() }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

/// Content lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Parses the `cpmesh 1` text format.
pub fn parse_mesh(text: &str) -> Result<WeightedMesh, MeshError> {
    let mut lines = content_lines(text);

    let (ln, header) = lines.next().ok_or_else(|| syntax(1, "empty mesh file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("cpmesh") || toks.next() != Some("1") || toks.next().is_some() {
        return Err(syntax(ln, "expected header `cpmesh 1`"));
    }

    let (ln, counts) = lines.next().ok_or_else(|| syntax(ln + 1, "missing counts line"))?;
    let mut toks = counts.split_whitespace();
    let n: usize = parse_field(toks.next(), ln, "vertex count")?;
    let f_count: usize = parse_field(toks.next(), ln, "face count")?;
    let chi_declared: i64 = parse_field(toks.next(), ln, "euler characteristic")?;
    if toks.next().is_some() {
        return Err(syntax(ln, "trailing tokens on counts line"));
    }

    let mut faces = Vec::with_capacity(f_count);
    let mut last_line = ln;
    for _ in 0..f_count {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| syntax(last_line + 1, format!("expected {f_count} face lines")))?;
        last_line = ln;
        let mut toks = line.split_whitespace();
        if toks.next() != Some("f") {
            return Err(syntax(ln, "expected face line `f <i> <j> <k>`"));
        }
        let face = [
            parse_field(toks.next(), ln, "vertex index")?,
            parse_field(toks.next(), ln, "vertex index")?,
            parse_field(toks.next(), ln, "vertex index")?,
        ];
        if toks.next().is_some() {
            return Err(syntax(ln, "trailing tokens on face line"));
        }
        faces.push(face);
    }

    let topology = Triangulation::new(n, faces)?;
    let counted = euler_characteristic(&topology);
    if counted != chi_declared {
        return Err(MeshError::EulerMismatch { declared: chi_declared, counted });
    }

    let mut weights = vec![0.0; topology.edge_count()];
    let mut seen = vec![false; topology.edge_count()];
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("w") => {}
            Some("f") => return Err(syntax(ln, "more face lines than declared")),
            _ => return Err(syntax(ln, "expected weight line `w <edge> <phi>`")),
        }
        let edge: usize = parse_field(toks.next(), ln, "edge index")?;
        let phi: f64 = parse_field(toks.next(), ln, "weight")?;
        if toks.next().is_some() {
            return Err(syntax(ln, "trailing tokens on weight line"));
        }
        if edge >= weights.len() {
            return Err(syntax(ln, format!("edge index {edge} out of range ({} edges)", weights.len())));
        }
        if seen[edge] {
            return Err(syntax(ln, format!("duplicate weight for edge {edge}")));
        }
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(MeshError::WeightOutOfRange { line: ln, edge, phi });
        }
        seen[edge] = true;
        weights[edge] = phi;
    }

    WeightedMesh::new(topology, weights)
}

/// Serializes a mesh; [`parse_mesh`] reproduces it exactly.
pub fn write_mesh(m: &WeightedMesh) -> String {
    let t = m.topology();
    let mut out = String::new();
    out.push_str("cpmesh 1\n");
    let _ = writeln!(out, "{} {} {}", t.vertex_count(), t.face_count(), euler_characteristic(t));
    for f in t.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0], f[1], f[2]);
    }
    for (e, phi) in m.weights().iter().enumerate() {
        let _ = writeln!(out, "w {e} {phi}");
    }
    out
}

/// Parses a radii file (`r <i> <radius>` per vertex). Every vertex must appear once.
pub fn parse_radii(text: &str, vertex_count: usize) -> Result<Vec<f64>, MeshError> {
    let mut radii = vec![f64::NAN; vertex_count];
    for (ln, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        if toks.next() != Some("r") {
            return Err(syntax(ln, "expected radius line `r <i> <radius>`"));
        }
        let i: usize = parse_field(toks.next(), ln, "vertex index")?;
        let r: f64 = parse_field(toks.next(), ln, "radius")?;
        if toks.next().is_some() {
            return Err(syntax(ln, "trailing tokens on radius line"));
        }
        if i >= vertex_count {
            return Err(syntax(ln, format!("vertex {i} out of range (N = {vertex_count})")));
        }
        if !radii[i].is_nan() {
            return Err(syntax(ln, format!("duplicate radius for vertex {i}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(syntax(ln, format!("radius must be positive and finite, got {r}")));
        }
        radii[i] = r;
    }
    if let Some(i) = radii.iter().position(|r| r.is_nan()) {
        return Err(syntax(0, format!("missing radius for vertex {i}")));
    }
    Ok(radii)
}

pub fn write_radii(radii: &[f64]) -> String {
    let mut out = String::new();
    for (i, r) in radii.iter().enumerate() {
        let _ = writeln!(out, "r {i} {r}");
    }
    out
}

/// The link of a vertex subset and the sub-complex spanned by it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetLink {
    pub subset: Vec<usize>,
    /// `(edge, vertex)` pairs, one per face corner in the subset whose opposite
    /// edge has both endpoints outside the subset.
    pub link_pairs: Vec<(usize, usize)>,
    pub interior_vertices: Vec<usize>,
    pub interior_edges: Vec<usize>,
    pub interior_faces: Vec<usize>,
}

impl SubsetLink {
    pub fn interior_euler_characteristic(&self) -> i64 {
        self.interior_vertices.len() as i64 - self.interior_edges.len() as i64
            + self.interior_faces.len() as i64
    }
}

pub fn subset_link(t: &Triangulation, subset: &[usize]) -> Result<SubsetLink, MeshError> {
    let n = t.vertex_count();
    let mut inside = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(MeshError::SubsetVertexOutOfRange { vertex: v, vertex_count: n });
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(MeshError::ImproperSubset);
    }

    let mut link_pairs = Vec::new();
    for (f, face) in t.faces().iter().enumerate() {
        for c in 0..3 {
            let e = t.face_edges()[f][c];
            let [a, b] = t.edges()[e].ends;
            if inside[face[c]] && !inside[a] && !inside[b] {
                link_pairs.push((e, face[c]));
            }
        }
    }
    let interior_vertices: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
    let interior_edges = (0..t.edge_count())
        .filter(|&e| t.edges()[e].ends.iter().all(|&v| inside[v]))
        .collect();
    let interior_faces = (0..t.face_count())
        .filter(|&f| t.faces()[f].iter().all(|&v| inside[v]))
        .collect();

    Ok(SubsetLink { subset: interior_vertices.clone(), link_pairs, interior_vertices, interior_edges, interior_faces })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EconReport {
    pub holds: bool,
    /// First violating subset in (size, lexicographic) order.
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: u64,
}

/// Brute-force check of the Euclidean existence condition over all proper
/// vertex subsets, using the default execution strategy and vertex cap.
pub fn check_euclidean_condition(m: &WeightedMesh) -> Result<EconReport, MeshError> {
    check_euclidean_condition_with(m, DEFAULT_ECON_CAP, Execution::default())
}

/// Slack of the existence inequality for the subset encoded by `mask`:
/// `2 pi |I| chi / N + sum_link (pi - phi) - 2 pi chi(F_I)`. The condition holds
/// for this subset iff the slack is positive.
pub fn econ_slack(m: &WeightedMesh, mask: u64) -> f64 {
    let t = m.topology();
    let inside = |v: usize| mask >> v & 1 == 1;
    let n = t.vertex_count();
    let chi = euler_characteristic(t) as f64;
    let size = mask.count_ones() as f64;

    let mut link = 0.0;
    let mut faces_in = 0i64;
    for (f, face) in t.faces().iter().enumerate() {
        let mut all = true;
        for c in 0..3 {
            let v = face[c];
            if !inside(v) {
                all = false;
                continue;
            }
            let e = t.face_edges()[f][c];
            let [a, b] = t.edges()[e].ends;
            if !inside(a) && !inside(b) {
                link += PI - m.weights()[e];
            }
        }
        if all {
            faces_in += 1;
        }
    }
    let edges_in = t.edges().iter().filter(|e| inside(e.ends[0]) && inside(e.ends[1])).count() as i64;
    let chi_sub = (mask.count_ones() as i64 - edges_in + faces_in) as f64;

    2.0 * PI * size * chi / n as f64 + link - 2.0 * PI * chi_sub
}

/// All `k`-subsets of `0..n` as bitmasks in lexicographic order of their sorted
/// index tuples.
fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn check_euclidean_condition_with(
    m: &WeightedMesh,
    cap: usize,
    exec: Execution,
) -> Result<EconReport, MeshError> {
    let n = m.vertex_count();
    let cap = cap.min(63);
    if n > cap {
        return Err(MeshError::VertexCapExceeded { n, cap });
    }
    let mut checked = 0u64;
    for k in 1..n {
        let masks = combinations(n, k);
        let hit = exec.find_first(&masks, |&mask| econ_slack(m, mask) <= ECON_MARGIN);
        match hit {
            Some(pos) => {
                checked += pos as u64 + 1;
                let witness = (0..n).filter(|&v| masks[pos] >> v & 1 == 1).collect();
                return Ok(EconReport { holds: false, witness: Some(witness), subsets_checked: checked });
            }
            None => checked += masks.len() as u64,
        }
    }
    Ok(EconReport { holds: true, witness: None, subsets_checked: checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tetrahedron_counts() {
        let t = fixtures::tetrahedron();
        assert_eq!(t.edge_count(), 6);
        assert_eq!(euler_characteristic(&t), 2);
        assert!(t.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn octahedron_and_icosahedron_counts() {
        let o = fixtures::octahedron();
        assert_eq!((o.vertex_count(), o.edge_count(), o.face_count()), (6, 12, 8));
        assert_eq!(euler_characteristic(&o), 2);
        let i = fixtures::icosahedron();
        assert_eq!((i.vertex_count(), i.edge_count(), i.face_count()), (12, 30, 20));
        assert_eq!(euler_characteristic(&i), 2);
        assert!(i.degrees().iter().all(|&d| d == 5));
    }

    #[test]
    fn genus_two_counts() {
        // Independent count straight from the face list: distinct vertex pairs.
        let faces = fixtures::GENUS2_FACES;
        let mut pairs = std::collections::BTreeSet::new();
        let mut verts = std::collections::BTreeSet::new();
        for f in faces {
            for c in 0..3 {
                let (a, b) = (f[c], f[(c + 1) % 3]);
                pairs.insert((a.min(b), a.max(b)));
                verts.insert(a);
            }
        }
        let chi = verts.len() as i64 - pairs.len() as i64 + faces.len() as i64;
        assert_eq!(chi, -2);
        let t = fixtures::genus2();
        assert_eq!(t.vertex_count(), 10);
        assert_eq!(euler_characteristic(&t), -2);
        assert_eq!(t.edge_count(), pairs.len());
    }

    #[test]
    fn generalized_one_vertex_torus() {
        let t = fixtures::one_vertex_torus();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(euler_characteristic(&t), 0);
        assert_eq!(t.degrees(), &[6]);
    }

    #[test]
    fn rejects_boundary_and_dangling() {
        let err = Triangulation::new(3, vec![[0, 1, 2]]).unwrap_err();
        assert!(matches!(err, MeshError::NonManifoldEdge { count: 1, .. }));
        let tet = fixtures::tetrahedron();
        let err = Triangulation::new(5, tet.faces().to_vec()).unwrap_err();
        assert_eq!(err, MeshError::DanglingVertex(4));
        let err = Triangulation::new(3, vec![[0, 1, 5]]).unwrap_err();
        assert!(matches!(err, MeshError::VertexOutOfRange { vertex: 5, .. }));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "cpmesh 1\n4 4 2\nf 0 1 2\nf 0 2 3\nf 0 x 1\nf 1 3 2\n";
        assert_eq!(parse_mesh(bad).unwrap_err(), MeshError::Syntax { line: 5, message: "invalid vertex index `x`".into() });
        let tet = write_mesh(&fixtures::weighted(fixtures::tetrahedron(), 0.0));
        let over = tet.replace("w 2 0", "w 2 1.6");
        assert!(matches!(parse_mesh(&over).unwrap_err(), MeshError::WeightOutOfRange { edge: 2, .. }));
        let wrong_chi = tet.replace("4 4 2", "4 4 0");
        assert!(matches!(parse_mesh(&wrong_chi).unwrap_err(), MeshError::EulerMismatch { declared: 0, counted: 2 }));
        assert!(matches!(parse_mesh("cpmesh 2\n").unwrap_err(), MeshError::Syntax { line: 1, .. }));
    }

    #[test]
    fn missing_weights_default_to_zero_and_comments_are_ignored() {
        let text = "# tetra\ncpmesh 1\n4 4 2 # counts\nf 0 1 2\nf 0 2 3\nf 0 3 1\nf 1 3 2\nw 5 0.25\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.weights(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.25]);
    }

    #[test]
    fn radii_file() {
        let r = parse_radii("r 1 2.5\n# c\nr 0 1\n", 2).unwrap();
        assert_eq!(r, vec![1.0, 2.5]);
        assert!(parse_radii("r 0 1\n", 2).is_err());
        assert!(parse_radii("r 0 -1\nr 1 1\n", 2).is_err());
        assert_eq!(parse_radii(&write_radii(&[0.1, 3.0]), 2).unwrap(), vec![0.1, 3.0]);
    }

    #[test]
    fn tetrahedron_single_vertex_link() {
        let t = fixtures::tetrahedron();
        let link = subset_link(&t, &[0]).unwrap();
        assert_eq!(link.link_pairs.len(), 3);
        assert!(link.link_pairs.iter().all(|&(_, v)| v == 0));
        assert_eq!(link.interior_euler_characteristic(), 1);

        let link = subset_link(&t, &[0, 1, 2]).unwrap();
        assert!(link.link_pairs.is_empty());

        assert_eq!(subset_link(&t, &[]).unwrap_err(), MeshError::ImproperSubset);
        assert_eq!(subset_link(&t, &[0, 1, 2, 3]).unwrap_err(), MeshError::ImproperSubset);
    }

    #[test]
    fn octahedron_antipodal_pair() {
        let t = fixtures::octahedron();
        let link = subset_link(&t, &[0, 5]).unwrap();
        assert_eq!(link.interior_vertices.len(), 2);
        assert!(link.interior_edges.is_empty());
        assert_eq!(link.interior_euler_characteristic(), 2);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c = combinations(4, 2);
        let expect: Vec<u64> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| 1 << a | 1 << b)
            .collect();
        assert_eq!(c, expect);
        assert_eq!(combinations(5, 5), vec![0b11111]);
        assert_eq!(combinations(6, 3).len(), 20);
    }

    #[test]
    fn tetrahedron_condition_holds() {
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.0);
        let r = check_euclidean_condition(&m).unwrap();
        assert!(r.holds);
        assert_eq!(r.subsets_checked, 14);
    }

    #[test]
    fn vertex_cap() {
        let m = fixtures::weighted(fixtures::icosahedron(), 0.0);
        let err = check_euclidean_condition_with(&m, 8, Execution::Sequential).unwrap_err();
        assert_eq!(err, MeshError::VertexCapExceeded { n: 12, cap: 8 });
    }

    #[test]
    fn empty_link_reduces_to_size_term() {
        // Tetrahedron, I = three vertices: empty link, F_I is one closed triangle
        // (chi = 1), so the inequality reads 2 pi * 3 * 2 / 4 > 2 pi.
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.0);
        let slack = econ_slack(&m, 0b0111);
        assert!((slack - (3.0 * PI - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn obstructed_fixture_has_deterministic_witness() {
        let m = fixtures::obstructed_octahedron();
        let seq = check_euclidean_condition_with(&m, 20, Execution::Sequential).unwrap();
        let par = check_euclidean_condition_with(&m, 20, Execution::Parallel).unwrap();
        assert!(!seq.holds);
        assert_eq!(seq, par);
        // The first stellated vertex has degree 3 and right-angled opposite edges.
        assert_eq!(seq.witness, Some(vec![6]));
    }
}
