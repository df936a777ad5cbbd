//! The curvature potential `F(u) = int_a^u sum_i (K_i - K_target) du_i`, its
//! derivatives, and a damped Newton solver for the constant (Euclidean) or
//! zero (hyperbolic) curvature packing.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    curvatures, metric_from_u, Background, GeometryError, GeometryState, PackingMetric, UCoordinates,
};
use crate::mesh::WeightedMesh;

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: u32 = 40;
/// Hyperbolic iterates stay at least this far below zero.
const DOMAIN_MARGIN: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("adaptive quadrature did not reach tolerance within depth {SIMPSON_DEPTH}")]
    Quadrature,
    #[error("segment leaves the hyperbolic domain u < 0")]
    DomainExit,
    #[error("Hessian is singular even after regularization")]
    Singular,
    #[error("existence detection needs at least one starting point")]
    NoAttempts,
    #[error("starting point has {got} coordinates, mesh has {expected} vertices")]
    Dimension { expected: usize, got: usize },
}

/// Mesh, background, base point and target curvature of one potential.
#[derive(Debug, Clone)]
pub struct PotentialContext<'a> {
    mesh: &'a WeightedMesh,
    background: Background,
    base_point: Vec<f64>,
    target: f64,
}

impl<'a> PotentialContext<'a> {
    /// Base point `u = 0` (Euclidean) or `r = 1` (hyperbolic).
    pub fn new(mesh: &'a WeightedMesh, background: Background) -> Self {
        let n = mesh.vertex_count();
        let base_point = match background {
            Background::Euclidean => vec![0.0; n],
            Background::Hyperbolic => PackingMetric::uniform(n, 1.0, background)
                .expect("unit radii are valid")
                .to_u()
                .into_values(),
        };
        Self::build(mesh, background, base_point)
    }

    pub fn with_base_point(mesh: &'a WeightedMesh, base_point: &UCoordinates) -> Result<Self, PotentialError> {
        check_dim(mesh, base_point.values())?;
        Ok(Self::build(mesh, base_point.background(), base_point.values().to_vec()))
    }

    fn build(mesh: &'a WeightedMesh, background: Background, base_point: Vec<f64>) -> Self {
        let target = match background {
            Background::Euclidean => crate::geometry::average_curvature(mesh.topology()),
            Background::Hyperbolic => 0.0,
        };
        PotentialContext { mesh, background, base_point, target }
    }

    pub fn mesh(&self) -> &WeightedMesh {
        self.mesh
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    /// Per-vertex target curvature (the same at every vertex).
    pub fn target(&self) -> f64 {
        self.target
    }

    fn metric(&self, u: &[f64]) -> Result<PackingMetric, PotentialError> {
        check_dim(self.mesh, u)?;
        Ok(metric_from_u(u, self.background)?)
    }

    /// `K(u) - K_target`.
    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>, PotentialError> {
        let c = curvatures(self.mesh, &self.metric(u)?)?;
        Ok(c.k.iter().map(|k| k - self.target).collect())
    }

    /// `L(u)`, the Jacobian of the gradient.
    pub fn hessian(&self, u: &[f64]) -> Result<DMatrix<f64>, PotentialError> {
        Ok(GeometryState::assemble(self.mesh, &self.metric(u)?)?.l)
    }

    /// `F(u)` relative to the base point.
    pub fn value(&self, u: &[f64]) -> Result<f64, PotentialError> {
        self.segment_integral(&self.base_point, u)
    }

    /// Line integral of the gradient along the straight segment `from -> to`.
    pub fn segment_integral(&self, from: &[f64], to: &[f64]) -> Result<f64, PotentialError> {
        check_dim(self.mesh, from)?;
        check_dim(self.mesh, to)?;
        let dir: Vec<f64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
        if dir.iter().all(|&d| d == 0.0) {
            return Ok(0.0);
        }
        if self.background == Background::Hyperbolic && from.iter().chain(to).any(|&x| !(x < 0.0)) {
            return Err(PotentialError::DomainExit);
        }
        let integrand = |s: f64| -> Result<f64, PotentialError> {
            let point: Vec<f64> = from.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
            let g = self.gradient(&point)?;
            Ok(g.iter().zip(&dir).map(|(g, d)| g * d).sum())
        };
        adaptive_simpson(&integrand, 0.0, 1.0, SIMPSON_TOL)
    }
}

fn check_dim(mesh: &WeightedMesh, u: &[f64]) -> Result<(), PotentialError> {
    if u.len() != mesh.vertex_count() {
        return Err(PotentialError::Dimension { expected: mesh.vertex_count(), got: u.len() });
    }
    Ok(())
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, PotentialError>
where
    F: Fn(f64) -> Result<f64, PotentialError>,
{
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, PotentialError>
where
    F: Fn(f64) -> Result<f64, PotentialError>,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // round-off floor so that large integrals do not chase unreachable tolerances
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(PotentialError::Quadrature);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

pub fn potential_value(ctx: &PotentialContext, u: &UCoordinates) -> Result<f64, PotentialError> {
    ctx.value(u.values())
}

pub fn potential_gradient(ctx: &PotentialContext, u: &UCoordinates) -> Result<Vec<f64>, PotentialError> {
    ctx.gradient(u.values())
}

pub fn potential_hessian(ctx: &PotentialContext, u: &UCoordinates) -> Result<DMatrix<f64>, PotentialError> {
    ctx.hessian(u.values())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Stop when `max |K - K_target|` is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Consecutive iterations of growing gradient norm that count as divergence.
    pub growth_window: usize,
    /// Iterates with some `|u_i|` beyond this count as escaped to infinity.
    pub escape_bound: f64,
    pub armijo_c1: f64,
    pub max_halvings: u32,
    pub ridge: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-10,
            max_iter: 200,
            growth_window: 20,
            escape_bound: 50.0,
            armijo_c1: 1e-4,
            max_halvings: 60,
            ridge: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SolveStatus {
    Found,
    Diverged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub solution: Option<UCoordinates>,
    pub final_gradient_norm: f64,
    pub iterations: usize,
    /// `(max |K - K_target|, step length in max norm)` per iteration.
    pub step_history: Vec<(f64, f64)>,
    /// True if a ridge had to be added to factor the Hessian.
    pub regularized: bool,
    /// Last iterate, whatever the status.
    pub last_iterate: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub solution_radii: Option<Vec<f64>>,
    pub regularized: bool,
}

impl SolveReport {
    pub fn solution_radii(&self) -> Option<Vec<f64>> {
        self.solution.as_ref().and_then(|u| u.to_metric().ok()).map(|m| m.radii().to_vec())
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            status: self.status,
            iterations: self.iterations,
            final_gradient_norm: self.final_gradient_norm,
            solution_radii: self.solution_radii(),
            regularized: self.regularized,
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn project_mean_zero(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Solves `H delta = rhs` by Cholesky, retrying once with a ridge.
fn solve_spd(h: DMatrix<f64>, rhs: DVector<f64>, ridge: f64) -> Result<(DVector<f64>, bool), PotentialError> {
    if let Some(ch) = h.clone().cholesky() {
        return Ok((ch.solve(&rhs), false));
    }
    let n = h.nrows();
    let bumped = h + DMatrix::identity(n, n) * ridge;
    match bumped.cholesky() {
        Some(ch) => Ok((ch.solve(&rhs), true)),
        None => Err(PotentialError::Singular),
    }
}

/// Damped Newton iteration on `F`.
pub fn newton_solve(
    ctx: &PotentialContext,
    u_init: &UCoordinates,
    cfg: &NewtonConfig,
) -> Result<SolveReport, PotentialError> {
    let n = ctx.mesh().vertex_count();
    check_dim(ctx.mesh(), u_init.values())?;
    let bg = ctx.background();
    let mut u = u_init.values().to_vec();
    if bg == Background::Euclidean {
        project_mean_zero(&mut u);
    }

    let mut history = Vec::new();
    let mut regularized = false;
    let mut growth_streak = 0;
    let mut prev_norm = f64::INFINITY;

    let report = |status, u: Vec<f64>, norm, iterations, history, regularized| {
        let solution = (status == SolveStatus::Found).then(|| UCoordinates::new(u.clone(), bg).expect("iterate in domain"));
        SolveReport { status, solution, final_gradient_norm: norm, iterations, step_history: history, regularized, last_iterate: u }
    };

    for iter in 0..=cfg.max_iter {
        let state = match metric_from_u(&u, bg).and_then(|m| GeometryState::assemble(ctx.mesh(), &m)) {
            Ok(s) => s,
            Err(_) => return Ok(report(SolveStatus::Diverged, u, f64::NAN, iter, history, regularized)),
        };
        let g: Vec<f64> = state.k().iter().map(|k| k - ctx.target()).collect();
        let norm = max_abs(&g);
        if norm <= cfg.tol {
            return Ok(report(SolveStatus::Found, u, norm, iter, history, regularized));
        }
        if norm > prev_norm {
            growth_streak += 1;
        } else {
            growth_streak = 0;
        }
        prev_norm = norm;
        if growth_streak >= cfg.growth_window || max_abs(&u) > cfg.escape_bound {
            return Ok(report(SolveStatus::Diverged, u, norm, iter, history, regularized));
        }
        if iter == cfg.max_iter {
            return Ok(report(SolveStatus::MaxIterations, u, norm, iter, history, regularized));
        }

        let mut h = state.l;
        if bg == Background::Euclidean {
            h.add_scalar_mut(1.0 / n as f64);
        }
        let (delta, ridged) = solve_spd(h, -DVector::from_column_slice(&g), cfg.ridge)?;
        regularized |= ridged;
        let mut delta: Vec<f64> = delta.iter().copied().collect();
        if bg == Background::Euclidean {
            project_mean_zero(&mut delta);
        }
        let slope: f64 = g.iter().zip(&delta).map(|(g, d)| g * d).sum();

        let mut s = 1.0;
        if bg == Background::Hyperbolic {
            while u.iter().zip(&delta).any(|(x, d)| x + s * d >= -DOMAIN_MARGIN) {
                s *= 0.5;
            }
        }
        let trial = |s: f64| -> Vec<f64> { u.iter().zip(&delta).map(|(x, d)| x + s * d).collect() };

        let mut accepted = None;
        let mut fallback = None;
        for _ in 0..=cfg.max_halvings {
            let cand = trial(s);
            if let Ok(df) = ctx.segment_integral(&u, &cand) {
                if df <= cfg.armijo_c1 * s * slope {
                    accepted = Some(cand);
                    break;
                }
                if fallback.is_none() && ctx.gradient(&cand).map(|gc| max_abs(&gc) < norm).unwrap_or(false) {
                    fallback = Some((s, cand));
                }
            }
            s *= 0.5;
        }
        let next = match (accepted, fallback) {
            (Some(c), _) => c,
            (None, Some((fs, c))) => {
                s = fs;
                c
            }
            (None, None) => return Ok(report(SolveStatus::Diverged, u, norm, iter, history, regularized)),
        };
        history.push((norm, s * max_abs(&delta)));
        u = next;
        if bg == Background::Euclidean {
            project_mean_zero(&mut u);
        }
    }
    unreachable!("loop returns on its last iteration")
}

#[derive(Debug, Clone)]
pub struct ExistenceReport {
    pub exists: bool,
    /// Set when the verdict is negative: failing to converge is not a proof.
    pub evidence_only: bool,
    pub evidence: Vec<SolveReport>,
}

/// Runs Newton from each starting point; any success means a packing exists.
pub fn detect_existence(
    ctx: &PotentialContext,
    attempts: &[UCoordinates],
    cfg: &NewtonConfig,
) -> Result<ExistenceReport, PotentialError> {
    if attempts.is_empty() {
        return Err(PotentialError::NoAttempts);
    }
    let evidence = attempts.iter().map(|u| newton_solve(ctx, u, cfg)).collect::<Result<Vec<_>, _>>()?;
    let exists = evidence.iter().any(|r| r.status == SolveStatus::Found);
    Ok(ExistenceReport { exists, evidence_only: !exists, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::average_curvature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const E: Background = Background::Euclidean;
    const H: Background = Background::Hyperbolic;

    fn random_u(rng: &mut ChaCha8Rng, n: usize, bg: Background) -> Vec<f64> {
        let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        PackingMetric::new(radii, bg).unwrap().to_u().into_values()
    }

    #[test]
    fn value_at_base_point_is_zero() {
        let m = fixtures::weighted(fixtures::octahedron(), 0.3);
        for bg in [E, H] {
            let ctx = PotentialContext::new(&m, bg);
            assert_eq!(ctx.value(ctx.base_point()).unwrap(), 0.0);
        }
    }

    #[test]
    fn quadrature_of_polynomials_is_exact() {
        let f = |s: f64| -> Result<f64, PotentialError> { Ok(3.0 * s * s - 2.0 * s + 1.0) };
        assert!((adaptive_simpson(&f, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        let g = |s: f64| -> Result<f64, PotentialError> { Ok((5.0 * s).sin()) };
        let exact = (1.0 - 5f64.cos()) / 5.0;
        assert!((adaptive_simpson(&g, 0.0, 1.0, 1e-12).unwrap() - exact).abs() < 1e-11);
    }

    #[test]
    fn path_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = fixtures::weighted(fixtures::octahedron(), 0.4);
        for bg in [E, H] {
            let ctx = PotentialContext::new(&m, bg);
            for _ in 0..10 {
                let a = random_u(&mut rng, 6, bg);
                let b = random_u(&mut rng, 6, bg);
                let corner: Vec<f64> = (0..6).map(|i| if i < 3 { b[i] } else { a[i] }).collect();
                let direct = ctx.segment_integral(&a, &b).unwrap();
                let legs = ctx.segment_integral(&a, &corner).unwrap() + ctx.segment_integral(&corner, &b).unwrap();
                assert!((direct - legs).abs() <= 1e-8, "{bg:?} {direct} vs {legs}");
            }
        }
    }

    #[test]
    fn euclidean_translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let m = fixtures::weighted(fixtures::icosahedron(), 0.2);
        let ctx = PotentialContext::new(&m, E);
        for _ in 0..5 {
            let u = random_u(&mut rng, 12, E);
            let c = rng.random_range(-2.0..2.0);
            let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
            assert!((ctx.value(&u).unwrap() - ctx.value(&shifted).unwrap()).abs() <= 1e-8);
        }
    }

    #[test]
    fn gradient_matches_potential_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.5);
        for bg in [E, H] {
            let ctx = PotentialContext::new(&m, bg);
            let u = random_u(&mut rng, 4, bg);
            let g = ctx.gradient(&u).unwrap();
            let h = 1e-4;
            for i in 0..4 {
                let (mut p, mut q) = (u.clone(), u.clone());
                p[i] += h;
                q[i] -= h;
                let fd = ctx.segment_integral(&q, &p).unwrap() / (2.0 * h);
                assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1e-3), "{bg:?} {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn convex_along_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let m = fixtures::weighted(fixtures::octahedron(), 0.0);
        for bg in [E, H] {
            let ctx = PotentialContext::new(&m, bg);
            for _ in 0..10 {
                let mut a = random_u(&mut rng, 6, bg);
                let mut b = random_u(&mut rng, 6, bg);
                if bg == E {
                    project_mean_zero(&mut a);
                    project_mean_zero(&mut b);
                }
                let t = rng.random_range(0.05..0.95);
                let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
                let lhs = ctx.value(&mid).unwrap();
                let rhs = t * ctx.value(&a).unwrap() + (1.0 - t) * ctx.value(&b).unwrap();
                assert!(lhs <= rhs + 1e-8);
            }
        }
    }

    #[test]
    fn tetrahedron_newton_finds_unit_radii() {
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.0);
        let ctx = PotentialContext::new(&m, E);
        let init = UCoordinates::new(vec![0.2, -0.1, 0.0, -0.1], E).unwrap();
        let rep = newton_solve(&ctx, &init, &NewtonConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Found);
        let sol = rep.solution.as_ref().unwrap();
        assert!(max_abs(sol.values()) < 1e-8);
        assert!(!rep.regularized);

        // quadratic tail
        for w in rep.step_history.windows(2) {
            if w[0].0 < 1e-3 {
                assert!(w[1].0 <= 10.0 * w[0].0 * w[0].0, "{:?}", w);
            }
        }

        let again = newton_solve(&ctx, sol, &NewtonConfig::default()).unwrap();
        assert_eq!(again.status, SolveStatus::Found);
        assert!(again.iterations <= 1);
    }

    #[test]
    fn genus2_hyperbolic_solution_and_minimality() {
        let m = fixtures::weighted(fixtures::genus2(), 0.0);
        let ctx = PotentialContext::new(&m, H);
        let init = PackingMetric::uniform(10, 1.0, H).unwrap().to_u();
        let rep = newton_solve(&ctx, &init, &NewtonConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Found);
        let sol = rep.solution.clone().unwrap();
        assert!(max_abs(&ctx.gradient(sol.values()).unwrap()) <= 1e-8);

        let f_star = ctx.value(sol.values()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..10 {
            let probe = random_u(&mut rng, 10, H);
            assert!(ctx.value(&probe).unwrap() >= f_star - 1e-8);
        }
    }

    /// Plain gradient descent on F as an independent check of the Newton limit.
    #[test]
    fn newton_agrees_with_gradient_descent() {
        let m = fixtures::weighted(fixtures::genus2(), 0.0);
        let ctx = PotentialContext::new(&m, H);
        let init = PackingMetric::uniform(10, 1.0, H).unwrap().to_u();
        let newton = newton_solve(&ctx, &init, &NewtonConfig::default()).unwrap();
        let target = newton.solution.unwrap().into_values();

        let mut u = init.into_values();
        for _ in 0..20_000 {
            let g = ctx.gradient(&u).unwrap();
            if max_abs(&g) < 1e-10 {
                break;
            }
            for (x, gi) in u.iter_mut().zip(&g) {
                *x -= 0.05 * gi;
            }
        }
        let diff = u.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-7, "descent and Newton differ by {diff}");
    }

    #[test]
    fn icosahedron_random_start_is_symmetric() {
        let m = fixtures::weighted(fixtures::icosahedron(), 0.0);
        let ctx = PotentialContext::new(&m, E);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let init = UCoordinates::new(random_u(&mut rng, 12, E), E).unwrap();
        let rep = newton_solve(&ctx, &init, &NewtonConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Found);
        for r in rep.solution_radii().unwrap() {
            assert!((r - 1.0).abs() < 1e-6);
        }
        assert!((ctx.target() - average_curvature(m.topology())).abs() == 0.0);
    }

    #[test]
    fn obstructed_mesh_has_no_solution() {
        let m = fixtures::obstructed_octahedron();
        let ctx = PotentialContext::new(&m, E);
        let init = UCoordinates::new(vec![0.0; 9], E).unwrap();
        let rep = detect_existence(&ctx, &[init], &NewtonConfig::default()).unwrap();
        assert!(!rep.exists);
        assert!(rep.evidence_only);
        assert_eq!(rep.evidence[0].status, SolveStatus::Diverged);
    }

    #[test]
    fn existence_needs_attempts() {
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.0);
        let ctx = PotentialContext::new(&m, E);
        assert_eq!(detect_existence(&ctx, &[], &NewtonConfig::default()).unwrap_err(), PotentialError::NoAttempts);
        let at_solution = UCoordinates::new(vec![0.0; 4], E).unwrap();
        let rep = detect_existence(&ctx, &[at_solution], &NewtonConfig::default()).unwrap();
        assert!(rep.exists && !rep.evidence_only);
    }

    #[test]
    fn summary_serializes() {
        let m = fixtures::weighted(fixtures::tetrahedron(), 0.0);
        let ctx = PotentialContext::new(&m, E);
        let rep = newton_solve(&ctx, &UCoordinates::new(vec![0.1, 0.0, 0.0, -0.1], E).unwrap(), &NewtonConfig::default()).unwrap();
        let s = rep.summary();
        assert_eq!(s.status, SolveStatus::Found);
        assert_eq!(s.solution_radii.unwrap().len(), 4);
    }
}
