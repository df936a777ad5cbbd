//! Metric quantities of a circle packing on a weighted mesh.
//!
//! Angles come from half-angle formulas rather than `acos` of the cosine law:
//! for large hyperbolic radii the triangles get long and thin and `acos` of a
//! number close to one loses most of its digits. Hyperbolic quantities are
//! combined in log space (`ln sinh`, `ln cosh`) so nothing overflows below the
//! radius cap.
//!
//! All radius derivatives are analytic. Each face gets a 3x3 Jacobian
//! `d theta_c / d rho_x` over its corner slots, from which `B`, `A` and `L`
//! are accumulated.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{euler_characteristic, Triangulation, WeightedMesh};

/// Hyperbolic radii above this are treated as a blow-up.
pub const HYPERBOLIC_RADIUS_CAP: f64 = 350.0;
/// Smallest admissible cosine-law denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;
/// Smallest admissible corner angle.
pub const ANGLE_FLOOR: f64 = 1e-12;
/// Tolerated negative angle deficit before a hyperbolic area is rejected.
const AREA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    Euclidean,
    Hyperbolic,
}

impl Background {
    /// Curvature sign of the model plane.
    pub fn lambda(self) -> f64 {
        match self {
            Background::Euclidean => 0.0,
            Background::Hyperbolic => -1.0,
        }
    }

    /// `dr/du` at radius `r`.
    pub fn radius_factor(self, r: f64) -> f64 {
        match self {
            Background::Euclidean => r,
            Background::Hyperbolic => r.sinh(),
        }
    }
}

impl std::str::FromStr for Background {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "e" => Ok(Background::Euclidean),
            "hyperbolic" | "h" => Ok(Background::Hyperbolic),
            other => Err(format!("unknown background `{other}` (expected euclidean or hyperbolic)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("radius at vertex {vertex} must be positive and finite, got {value}")]
    InvalidRadius { vertex: usize, value: f64 },
    #[error("hyperbolic radius at vertex {vertex} is {value}, above the cap {HYPERBOLIC_RADIUS_CAP}; flow diverging")]
    RadiusOverflow { vertex: usize, value: f64 },
    #[error("u coordinate at vertex {vertex} is {value}, outside the {background:?} domain")]
    InvalidU { vertex: usize, value: f64, background: Background },
    #[error("triangle inequality violated in face {face:?}")]
    TriangleInequality { face: Option<usize> },
    #[error("near-degenerate face {face:?}")]
    DegenerateFace { face: Option<usize> },
    #[error("angle sum exceeds pi by {excess} in a hyperbolic face")]
    NegativeArea { excess: f64 },
    #[error("expected {expected} per-vertex values, got {got}")]
    VertexCount { expected: usize, got: usize },
    #[error("operation requires hyperbolic background")]
    RequiresHyperbolic,
}

impl GeometryError {
    fn in_face(self, f: usize) -> Self {
        match self {
            GeometryError::TriangleInequality { .. } => GeometryError::TriangleInequality { face: Some(f) },
            GeometryError::DegenerateFace { .. } => GeometryError::DegenerateFace { face: Some(f) },
            other => other,
        }
    }
}

/// `ln sinh x` for `x > 0` without overflow.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh x` without overflow.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - LN_2 + (-2.0 * a).exp().ln_1p()
}

fn check_radius(vertex: usize, r: f64, bg: Background) -> Result<(), GeometryError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(GeometryError::InvalidRadius { vertex, value: r });
    }
    if bg == Background::Hyperbolic && r > HYPERBOLIC_RADIUS_CAP {
        return Err(GeometryError::RadiusOverflow { vertex, value: r });
    }
    Ok(())
}

/// Per-vertex radii tagged with their background geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingMetric {
    radii: Vec<f64>,
    background: Background,
}

impl PackingMetric {
    pub fn new(radii: Vec<f64>, background: Background) -> Result<Self, GeometryError> {
        for (v, &r) in radii.iter().enumerate() {
            check_radius(v, r, background)?;
        }
        Ok(PackingMetric { radii, background })
    }

    pub fn uniform(n: usize, r: f64, background: Background) -> Result<Self, GeometryError> {
        Self::new(vec![r; n], background)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn to_u(&self) -> UCoordinates {
        let u = self
            .radii
            .iter()
            .map(|&r| match self.background {
                Background::Euclidean => r.ln(),
                // ln tanh(r/2), written as ln(1 - 2/(e^r + 1)) once tanh nears 1
                Background::Hyperbolic if r < 1.0 => (0.5 * r).tanh().ln(),
                Background::Hyperbolic => (-2.0 / (r.exp() + 1.0)).ln_1p(),
            })
            .collect();
        UCoordinates { u, background: self.background }
    }

    /// Euclidean radii rescaled so that their product is one.
    pub fn normalized_product(&self) -> Self {
        let mean_log = self.radii.iter().map(|r| r.ln()).sum::<f64>() / self.radii.len() as f64;
        let scale = (-mean_log).exp();
        PackingMetric { radii: self.radii.iter().map(|r| r * scale).collect(), background: self.background }
    }
}

/// Flow coordinates: `u = ln r` (Euclidean) or `u = ln tanh(r/2)` (hyperbolic).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UCoordinates {
    u: Vec<f64>,
    background: Background,
}

impl UCoordinates {
    pub fn new(u: Vec<f64>, background: Background) -> Result<Self, GeometryError> {
        for (v, &x) in u.iter().enumerate() {
            let ok = x.is_finite() && (background == Background::Euclidean || x < 0.0);
            if !ok {
                return Err(GeometryError::InvalidU { vertex: v, value: x, background });
            }
        }
        Ok(UCoordinates { u, background })
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn to_metric(&self) -> Result<PackingMetric, GeometryError> {
        let radii = self
            .u
            .iter()
            .map(|&x| match self.background {
                Background::Euclidean => x.exp(),
                // r = 2 artanh(e^u) = ln(1 + e^u) - ln(1 - e^u)
                Background::Hyperbolic => {
                    let e = x.exp();
                    let tail = if x < -LN_2 { (-e).ln_1p() } else { (-x.exp_m1()).ln() };
                    e.ln_1p() - tail
                }
            })
            .collect();
        PackingMetric::new(radii, self.background)
    }
}

pub fn to_u(metric: &PackingMetric) -> UCoordinates {
    metric.to_u()
}

pub fn from_u(u: &UCoordinates) -> Result<PackingMetric, GeometryError> {
    u.to_metric()
}

/// Builds a metric straight from a coordinate slice.
pub fn metric_from_u(u: &[f64], background: Background) -> Result<PackingMetric, GeometryError> {
    UCoordinates::new(u.to_vec(), background)?.to_metric()
}

/// Length of the edge between circles of radii `ri`, `rj` meeting at angle `phi`.
pub fn edge_length(ri: f64, rj: f64, phi: f64, bg: Background) -> Result<f64, GeometryError> {
    check_radius(0, ri, bg)?;
    check_radius(1, rj, bg)?;
    let s2 = (0.5 * phi).sin().powi(2);
    Ok(match bg {
        Background::Euclidean => ((ri + rj).powi(2) - 4.0 * ri * rj * s2).sqrt(),
        Background::Hyperbolic => {
            // sinh^2(l/2) = sinh^2((ri+rj)/2) - sinh ri sinh rj sin^2(phi/2)
            let x = (0.5 * (ri + rj)).sinh().powi(2) - ri.sinh() * rj.sinh() * s2;
            2.0 * x.sqrt().asinh()
        }
    })
}

/// Corner angles of a triangle; `lengths[c]` is the side opposite corner `c`.
pub fn corner_angles(lengths: [f64; 3], bg: Background) -> Result<[f64; 3], GeometryError> {
    let s = 0.5 * (lengths[0] + lengths[1] + lengths[2]);
    let gaps = [
        0.5 * (lengths[1] + lengths[2] - lengths[0]),
        0.5 * (lengths[0] + lengths[2] - lengths[1]),
        0.5 * (lengths[0] + lengths[1] - lengths[2]),
    ];
    if gaps.iter().any(|&g| !(g > 0.0)) || !s.is_finite() {
        return Err(GeometryError::TriangleInequality { face: None });
    }
    let logs = match bg {
        Background::Euclidean => [0.0; 4],
        Background::Hyperbolic => [ln_sinh(gaps[0]), ln_sinh(gaps[1]), ln_sinh(gaps[2]), ln_sinh(s)],
    };
    let mut angles = [0.0; 3];
    for c in 0..3 {
        let (a, b, d) = (c, (c + 1) % 3, (c + 2) % 3);
        let half_tan = match bg {
            Background::Euclidean => (gaps[b] * gaps[d] / (s * gaps[a])).sqrt(),
            Background::Hyperbolic => (0.5 * (logs[b] + logs[d] - logs[3] - logs[a])).exp(),
        };
        let theta = 2.0 * half_tan.atan();
        if !(theta >= ANGLE_FLOOR) {
            return Err(GeometryError::DegenerateFace { face: None });
        }
        angles[c] = theta;
    }
    Ok(angles)
}

/// Hyperbolic area is the angle deficit; Euclidean area is Heron's formula.
pub fn face_area(angles: [f64; 3], lengths: [f64; 3], bg: Background) -> Result<f64, GeometryError> {
    match bg {
        Background::Hyperbolic => {
            let deficit = PI - (angles[0] + angles[1] + angles[2]);
            if deficit < -AREA_SLACK {
                return Err(GeometryError::NegativeArea { excess: -deficit });
            }
            Ok(deficit.max(0.0))
        }
        Background::Euclidean => {
            let [a, b, c] = lengths;
            let s = 0.5 * (a + b + c);
            Ok((s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt())
        }
    }
}

/// `2 pi chi / N`.
pub fn average_curvature(t: &Triangulation) -> f64 {
    2.0 * PI * euler_characteristic(t) as f64 / t.vertex_count() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceGeometry {
    /// `lengths[c]` is the side opposite corner `c`.
    pub lengths: [f64; 3],
    pub angles: [f64; 3],
    pub area: f64,
}

/// Lengths, angles, areas and vertex curvatures of one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curvatures {
    pub background: Background,
    pub edge_lengths: Vec<f64>,
    pub faces: Vec<FaceGeometry>,
    pub k: Vec<f64>,
    pub k_av: f64,
}

impl Curvatures {
    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// `sum K - (2 pi chi - lambda Area)`.
    pub fn gauss_bonnet_residual(&self, chi: i64) -> f64 {
        let total: f64 = self.k.iter().sum();
        total - (2.0 * PI * chi as f64 - self.background.lambda() * self.total_area())
    }

    /// Curvature the flows drive towards: `k_av` (Euclidean) or zero (hyperbolic).
    pub fn target(&self) -> f64 {
        match self.background {
            Background::Euclidean => self.k_av,
            Background::Hyperbolic => 0.0,
        }
    }

    pub fn max_curvature_error(&self) -> f64 {
        let target = self.target();
        self.k.iter().map(|k| (k - target).abs()).fold(0.0, f64::max)
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), GeometryError> {
    if expected != got {
        return Err(GeometryError::VertexCount { expected, got });
    }
    Ok(())
}

/// Radii and weights seen from the corners of face `f`: `radii[c]` at corner
/// `c`, `phis[c]` on the side opposite corner `c`.
fn face_inputs(m: &WeightedMesh, metric: &PackingMetric, f: usize) -> ([f64; 3], [f64; 3]) {
    let t = m.topology();
    let face = t.faces()[f];
    let edges = t.face_edges()[f];
    let r = metric.radii();
    (
        [r[face[0]], r[face[1]], r[face[2]]],
        [m.weights()[edges[0]], m.weights()[edges[1]], m.weights()[edges[2]]],
    )
}

/// `K_i = 2 pi - sum of corner angles at i`, plus the per-face data.
pub fn curvatures(m: &WeightedMesh, metric: &PackingMetric) -> Result<Curvatures, GeometryError> {
    let t = m.topology();
    check_len(t.vertex_count(), metric.len())?;
    let bg = metric.background();
    let r = metric.radii();

    let mut edge_lengths = Vec::with_capacity(t.edge_count());
    for (e, edge) in t.edges().iter().enumerate() {
        let [a, b] = edge.ends;
        let l = edge_length(r[a], r[b], m.weights()[e], bg)?;
        edge_lengths.push(l);
    }

    let mut k = vec![2.0 * PI; t.vertex_count()];
    let mut faces = Vec::with_capacity(t.face_count());
    for (f, face) in t.faces().iter().enumerate() {
        let fe = t.face_edges()[f];
        let lengths = [edge_lengths[fe[0]], edge_lengths[fe[1]], edge_lengths[fe[2]]];
        let angles = corner_angles(lengths, bg).map_err(|e| e.in_face(f))?;
        let area = face_area(angles, lengths, bg)?;
        for c in 0..3 {
            k[face[c]] -= angles[c];
        }
        faces.push(FaceGeometry { lengths, angles, area });
    }

    Ok(Curvatures { background: bg, edge_lengths, faces, k, k_av: average_curvature(t) })
}

/// Radius derivatives of one side, at both of its ends.
#[derive(Debug, Clone, Copy)]
struct SideTerms {
    /// `d l / d rho` at each end.
    dl: [f64; 2],
    /// `sin^2(a/2)` at each end, where `a` is the angle at that circle's
    /// center between the side and the ray to an intersection point of the
    /// two circles.
    half_sine_sq: [f64; 2],
    /// `ln sinh l`; unused for Euclidean sides.
    ln_sinh_len: f64,
}

impl SideTerms {
    fn new(rx: f64, ry: f64, phi: f64, l: f64, bg: Background) -> Self {
        let s2 = (0.5 * phi).sin().powi(2);
        let cos = phi.cos();
        let s = 0.5 * (rx + ry + l);
        // half-perimeter gaps of the triangle formed by the two centers and
        // an intersection point, opposite each circle's radius
        let (gap_x, gap_y) = (0.5 * (ry + l - rx), 0.5 * (rx + l - ry));
        match bg {
            Background::Euclidean => {
                let half_sine_sq = if s2 == 0.0 {
                    [0.0; 2]
                } else {
                    let gap = 2.0 * rx * ry * s2 / (rx + ry + l);
                    let tx = gap_x * gap / (s * gap_y);
                    let ty = gap_y * gap / (s * gap_x);
                    [tx / (1.0 + tx), ty / (1.0 + ty)]
                };
                SideTerms { dl: [(rx + ry * cos) / l, (ry + rx * cos) / l], half_sine_sq, ln_sinh_len: f64::NAN }
            }
            Background::Hyperbolic => {
                let (sx, cx, sy, cy) = (ln_sinh(rx), ln_cosh(rx), ln_sinh(ry), ln_cosh(ry));
                let lsl = ln_sinh(l);
                let dl = [
                    (sx + cy - lsl).exp() + cos * (cx + sy - lsl).exp(),
                    (sy + cx - lsl).exp() + cos * (cy + sx - lsl).exp(),
                ];
                let half_sine_sq = if s2 == 0.0 {
                    [0.0; 2]
                } else {
                    let ls = ln_sinh(s);
                    // sinh of (rx + ry - l) / 2, free of cancellation
                    let ln_sinh_gap = sx + sy + s2.ln() - ls;
                    let (lgx, lgy) = (ln_sinh(gap_x), ln_sinh(gap_y));
                    let tx = (lgx + ln_sinh_gap - ls - lgy).exp();
                    let ty = (lgy + ln_sinh_gap - ls - lgx).exp();
                    [tx / (1.0 + tx), ty / (1.0 + ty)]
                };
                SideTerms { dl, half_sine_sq, ln_sinh_len: lsl }
            }
        }
    }

    fn reversed(self) -> Self {
        SideTerms { dl: [self.dl[1], self.dl[0]], half_sine_sq: [self.half_sine_sq[1], self.half_sine_sq[0]], ..self }
    }
}

/// Jacobian `d[c][x] = d theta_c / d rho_x` of one face over its corner slots.
fn face_angle_jacobian(
    radii: [f64; 3],
    phis: [f64; 3],
    geo: &FaceGeometry,
    bg: Background,
) -> Result<[[f64; 3]; 3], GeometryError> {
    let sides: [SideTerms; 3] = std::array::from_fn(|s| {
        SideTerms::new(radii[(s + 1) % 3], radii[(s + 2) % 3], phis[s], geo.lengths[s], bg)
    });
    face_jacobian_from_sides(geo, &sides, bg)
}

/// Same as [`face_angle_jacobian`], with `sides[s]` running from corner `s+1` to `s+2`.
fn face_jacobian_from_sides(
    geo: &FaceGeometry,
    sides: &[SideTerms; 3],
    bg: Background,
) -> Result<[[f64; 3]; 3], GeometryError> {
    let l = geo.lengths;
    let th = geo.angles;
    // end index of corner x on side s
    let end = |s: usize, x: usize| usize::from(x != (s + 1) % 3);
    let dl = |s: usize, x: usize| sides[s].dl[end(s, x)];
    let half_sine_sq = |s: usize, x: usize| sides[s].half_sine_sq[end(s, x)];

    let mut d = [[0.0; 3]; 3];
    for c in 0..3 {
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        let sin_c = th[c].sin();
        // d theta_c / d l_c
        let g = match bg {
            Background::Euclidean => {
                let den = l[c1] * l[c2] * sin_c;
                if !(den > DENOMINATOR_FLOOR) {
                    return Err(GeometryError::DegenerateFace { face: None });
                }
                l[c] / den
            }
            Background::Hyperbolic => {
                if !(sin_c > DENOMINATOR_FLOOR) {
                    return Err(GeometryError::DegenerateFace { face: None });
                }
                (sides[c].ln_sinh_len - sides[c1].ln_sinh_len - sides[c2].ln_sinh_len - sin_c.ln()).exp()
            }
        };
        d[c][c] = -g * (th[c2].cos() * dl(c1, c) + th[c1].cos() * dl(c2, c));

        // Off-diagonal entries in half-angle form, which stays accurate when
        // the angles are tiny:
        // (dl_c/drho_x - cos theta_x dl_o/drho_x) / (S(l_o) sin theta_x)
        // with numerator 2 (t + b - a - 2 t b).
        for (x, o) in [(c1, c2), (c2, c1)] {
            let t = (0.5 * th[x]).sin().powi(2);
            let (a, b) = (half_sine_sq(c, x), half_sine_sq(o, x));
            let num = 2.0 * (t + b - a - 2.0 * t * b);
            let sin_x = th[x].sin();
            d[c][x] = match bg {
                Background::Euclidean => num / (l[o] * sin_x),
                Background::Hyperbolic => num * (-sides[o].ln_sinh_len - sin_x.ln()).exp(),
            };
        }
    }
    Ok(d)
}

/// Face Jacobians for every face of the mesh.
fn all_face_jacobians(
    m: &WeightedMesh,
    metric: &PackingMetric,
    curv: &Curvatures,
) -> Result<Vec<[[f64; 3]; 3]>, GeometryError> {
    let t = m.topology();
    let r = metric.radii();
    let bg = metric.background();
    let per_edge: Vec<SideTerms> = t
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let [a, b] = edge.ends;
            SideTerms::new(r[a], r[b], m.weights()[e], curv.edge_lengths[e], bg)
        })
        .collect();
    (0..t.face_count())
        .map(|f| {
            let face = t.faces()[f];
            let fe = t.face_edges()[f];
            let sides: [SideTerms; 3] = std::array::from_fn(|s| {
                let terms = per_edge[fe[s]];
                if t.edges()[fe[s]].ends[0] == face[(s + 1) % 3] {
                    terms
                } else {
                    terms.reversed()
                }
            });
            face_jacobian_from_sides(&curv.faces[f], &sides, bg).map_err(|e| e.in_face(f))
        })
        .collect()
}

/// `(d theta_c/d r_c, d theta_c/d r_{c+1}, d theta_c/d r_{c+2})` for corner `c` of face `face`,
/// with the corners numbered cyclically from `c`.
pub fn angle_radius_derivatives(
    m: &WeightedMesh,
    metric: &PackingMetric,
    face: usize,
    corner: usize,
) -> Result<[f64; 3], GeometryError> {
    check_len(m.vertex_count(), metric.len())?;
    let (radii, phis) = face_inputs(m, metric, face);
    let bg = metric.background();
    let fe = m.topology().face_edges()[face];
    let mut lengths = [0.0; 3];
    for s in 0..3 {
        let (x, y) = ((s + 1) % 3, (s + 2) % 3);
        lengths[s] = edge_length(radii[x], radii[y], m.weights()[fe[s]], bg)?;
    }
    let angles = corner_angles(lengths, bg).map_err(|e| e.in_face(face))?;
    let geo = FaceGeometry { lengths, angles, area: 0.0 };
    let d = face_angle_jacobian(radii, phis, &geo, bg).map_err(|e| e.in_face(face))?;
    let row = d[corner];
    Ok([row[corner], row[(corner + 1) % 3], row[(corner + 2) % 3]])
}

/// The two one-sided evaluations of every `B_e`: through `d/dr_j` (the returned
/// `.0`, which is what [`assemble_b`] uses) and through `d/dr_i`.
fn b_two_sided(
    m: &WeightedMesh,
    metric: &PackingMetric,
    jac: &[[[f64; 3]; 3]],
) -> Vec<(f64, f64)> {
    let t = m.topology();
    let r = metric.radii();
    let bg = metric.background();
    t.edges()
        .iter()
        .map(|edge| {
            let [i, j] = edge.ends;
            let (hi, hj) = (bg.radius_factor(r[i]), bg.radius_factor(r[j]));
            let mut via_j = 0.0;
            let mut via_i = 0.0;
            for slot in &edge.slots {
                let face = t.faces()[slot.face];
                let (mut ci, mut cj) = ((slot.corner + 1) % 3, (slot.corner + 2) % 3);
                if face[ci] != i {
                    std::mem::swap(&mut ci, &mut cj);
                }
                let d = &jac[slot.face];
                via_j += d[ci][cj] * hj;
                via_i += d[cj][ci] * hi;
            }
            (via_j, via_i)
        })
        .collect()
}

/// `A_i = -h(r_i) sum over corners at i of d(theta_i + theta_j + theta_k)/d r_i`.
fn a_from_jacobians(m: &WeightedMesh, metric: &PackingMetric, jac: &[[[f64; 3]; 3]]) -> Vec<f64> {
    let t = m.topology();
    let bg = metric.background();
    let mut a = vec![0.0; t.vertex_count()];
    for (f, face) in t.faces().iter().enumerate() {
        for x in 0..3 {
            let total: f64 = (0..3).map(|c| jac[f][c][x]).sum();
            a[face[x]] -= total;
        }
    }
    for (ai, &ri) in a.iter_mut().zip(metric.radii()) {
        *ai *= bg.radius_factor(ri);
    }
    a
}

/// Graph Laplacian with per-edge weights: diagonal `sum_k B_ik`, off-diagonal `-B_ij`.
pub fn weighted_laplacian(t: &Triangulation, b: &[f64]) -> DMatrix<f64> {
    let n = t.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for (edge, &w) in t.edges().iter().zip(b) {
        let [i, j] = edge.ends;
        l[(i, i)] += w;
        l[(j, j)] += w;
        l[(i, j)] -= w;
        l[(j, i)] -= w;
    }
    l
}

/// Symmetric vertex-by-vertex matrix of edge weights (parallel edges summed).
pub fn edge_weight_matrix(t: &Triangulation, b: &[f64]) -> DMatrix<f64> {
    let n = t.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    for (edge, &w) in t.edges().iter().zip(b) {
        let [i, j] = edge.ends;
        m[(i, j)] += w;
        if i != j {
            m[(j, i)] += w;
        }
    }
    m
}

/// Non-zero entries as `(row, col, value)`, row-major.
pub fn triplets(m: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Everything the flows need at one metric.
#[derive(Debug, Clone)]
pub struct GeometryState {
    pub radii: Vec<f64>,
    pub curvatures: Curvatures,
    /// Per-edge `B_e`, in edge order.
    pub b: Vec<f64>,
    /// Per-vertex `A_i`, hyperbolic only.
    pub a: Option<Vec<f64>>,
    /// `L = dK/du`: `L_B` (Euclidean) or `A + L_B` (hyperbolic).
    pub l: DMatrix<f64>,
}

impl GeometryState {
    pub fn assemble(m: &WeightedMesh, metric: &PackingMetric) -> Result<Self, GeometryError> {
        let curv = curvatures(m, metric)?;
        let jac = all_face_jacobians(m, metric, &curv)?;
        let b: Vec<f64> = b_two_sided(m, metric, &jac).into_iter().map(|(via_j, _)| via_j).collect();
        let mut l = weighted_laplacian(m.topology(), &b);
        let a = match metric.background() {
            Background::Euclidean => None,
            Background::Hyperbolic => {
                let a = a_from_jacobians(m, metric, &jac);
                for (i, ai) in a.iter().enumerate() {
                    l[(i, i)] += ai;
                }
                Some(a)
            }
        };
        Ok(GeometryState { radii: metric.radii().to_vec(), curvatures: curv, b, a, l })
    }

    pub fn background(&self) -> Background {
        self.curvatures.background
    }

    pub fn k(&self) -> &[f64] {
        &self.curvatures.k
    }
}

pub fn assemble_b(m: &WeightedMesh, metric: &PackingMetric) -> Result<Vec<f64>, GeometryError> {
    Ok(assemble_b_two_sided(m, metric)?.into_iter().map(|(b, _)| b).collect())
}

/// Both one-sided evaluations of `B_e`, for symmetry checks.
pub fn assemble_b_two_sided(
    m: &WeightedMesh,
    metric: &PackingMetric,
) -> Result<Vec<(f64, f64)>, GeometryError> {
    let curv = curvatures(m, metric)?;
    let jac = all_face_jacobians(m, metric, &curv)?;
    Ok(b_two_sided(m, metric, &jac))
}

pub fn assemble_a(m: &WeightedMesh, metric: &PackingMetric) -> Result<Vec<f64>, GeometryError> {
    if metric.background() != Background::Hyperbolic {
        return Err(GeometryError::RequiresHyperbolic);
    }
    let curv = curvatures(m, metric)?;
    let jac = all_face_jacobians(m, metric, &curv)?;
    Ok(a_from_jacobians(m, metric, &jac))
}

pub fn assemble_l(m: &WeightedMesh, metric: &PackingMetric) -> Result<DMatrix<f64>, GeometryError> {
    Ok(GeometryState::assemble(m, metric)?.l)
}
