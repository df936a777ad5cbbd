//! The discrete p-Laplacian, the flow right-hand sides in u-coordinates, and a
//! small explicit integrator with per-step monitors.

use std::io::{self, Write};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    metric_from_u, Background, GeometryError, GeometryState, UCoordinates,
};
use crate::mesh::{Triangulation, WeightedMesh};
use crate::potential::PotentialContext;

const MAX_MONITOR_RETRIES: u32 = 40;
const MIN_RELATIVE_STEP: f64 = 1e-12;

/// `sign(x) |x|^q`, zero at zero.
pub fn signed_power(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(q)
    }
}

/// `(Delta_p f)_i = sum over edges ij of w_ij |f_j - f_i|^(p-2) (f_j - f_i)`.
///
/// Parallel edges each contribute; loops contribute nothing.
pub fn p_laplacian(t: &Triangulation, weights: &[f64], f: &[f64], p: f64) -> Vec<f64> {
    let mut out = vec![0.0; t.vertex_count()];
    for (edge, &w) in t.edges().iter().zip(weights) {
        let [i, j] = edge.ends;
        let flux = w * signed_power(f[j] - f[i], p - 1.0);
        out[i] += flux;
        out[j] -= flux;
    }
    out
}

/// `sum_i |k_av - K_i|^p`.
pub fn energy_p_calabi(k: &[f64], k_av: f64, p: f64) -> f64 {
    k.iter().map(|ki| (k_av - ki).abs().powf(p)).sum()
}

/// `sum over edges of w_e |K_j - K_i|^p`.
pub fn energy_dirichlet(t: &Triangulation, k: &[f64], weights: &[f64], p: f64) -> f64 {
    t.edges()
        .iter()
        .zip(weights)
        .map(|(e, &w)| w * (k[e.ends[1]] - k[e.ends[0]]).abs().powf(p))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum FlowKind {
    PCalabi,
    Ricci,
    RicciNormalized,
    PCalabiNormalized,
    GraphPCalabi,
}

impl std::str::FromStr for FlowKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "pcalabi" => Ok(FlowKind::PCalabi),
            "ricci" => Ok(FlowKind::Ricci),
            "riccinormalized" | "normalizedricci" => Ok(FlowKind::RicciNormalized),
            "pcalabinormalized" | "normalizedpcalabi" => Ok(FlowKind::PCalabiNormalized),
            "graphpcalabi" | "graph" => Ok(FlowKind::GraphPCalabi),
            _ => Err(format!(
                "unknown flow `{s}` (expected p-calabi, ricci, ricci-normalized, p-calabi-normalized or graph-p-calabi)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("exponent p must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("graph flow needs fixed edge weights")]
    MissingFixedWeights,
    #[error("fixed edge weights are only used by the graph flow")]
    UnexpectedFixedWeights,
    #[error("expected {expected} {what}, got {got}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error("{what} must be positive and finite")]
    NonPositive { what: &'static str },
    #[error("{kind:?} flow is not defined in the {background:?} background")]
    Background { kind: FlowKind, background: Background },
    #[error("invalid integrator setting: {0}")]
    Config(&'static str),
    #[error("invalid initial metric: {0}")]
    Initial(#[from] GeometryError),
    #[error("non-finite right-hand side")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub p: f64,
    pub background: Background,
    /// Per-edge weights held fixed in time (graph flow only).
    pub fixed_weights: Option<Vec<f64>>,
    /// Per-vertex measure dividing the graph flow (default 1).
    pub vertex_measure: Option<Vec<f64>>,
}

impl FlowSpec {
    pub fn new(kind: FlowKind, p: f64, background: Background) -> Self {
        FlowSpec { kind, p, background, fixed_weights: None, vertex_measure: None }
    }

    pub fn graph(p: f64, weights: Vec<f64>, measure: Option<Vec<f64>>) -> Self {
        FlowSpec {
            kind: FlowKind::GraphPCalabi,
            p,
            background: Background::Euclidean,
            fixed_weights: Some(weights),
            vertex_measure: measure,
        }
    }

    pub fn validate(&self, m: &WeightedMesh) -> Result<(), FlowError> {
        let uses_p = matches!(self.kind, FlowKind::PCalabi | FlowKind::PCalabiNormalized | FlowKind::GraphPCalabi);
        if uses_p && !(self.p > 1.0 && self.p.is_finite()) {
            return Err(FlowError::InvalidExponent(self.p));
        }
        let euclidean_only = matches!(
            self.kind,
            FlowKind::RicciNormalized | FlowKind::PCalabiNormalized | FlowKind::GraphPCalabi
        );
        if euclidean_only && self.background != Background::Euclidean {
            return Err(FlowError::Background { kind: self.kind, background: self.background });
        }
        match (&self.fixed_weights, self.kind) {
            (None, FlowKind::GraphPCalabi) => return Err(FlowError::MissingFixedWeights),
            (Some(_), k) if k != FlowKind::GraphPCalabi => return Err(FlowError::UnexpectedFixedWeights),
            (Some(w), _) => {
                check_positive("fixed edge weights", w, m.topology().edge_count())?;
            }
            _ => {}
        }
        if let Some(mu) = &self.vertex_measure {
            check_positive("vertex measures", mu, m.vertex_count())?;
        }
        Ok(())
    }

    /// Curvature the flow converges to.
    pub fn target(&self, t: &Triangulation) -> f64 {
        match self.background {
            Background::Euclidean => crate::geometry::average_curvature(t),
            Background::Hyperbolic => 0.0,
        }
    }
}

fn check_positive(what: &'static str, v: &[f64], expected: usize) -> Result<(), FlowError> {
    if v.len() != expected {
        return Err(FlowError::Length { what, expected, got: v.len() });
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(FlowError::NonPositive { what });
    }
    Ok(())
}

fn require(state: &GeometryState, bg: Background, kind: FlowKind) -> Result<(), FlowError> {
    if state.background() != bg {
        return Err(FlowError::Background { kind, background: state.background() });
    }
    Ok(())
}

/// `u' = Delta_p K` with the current `B`.
pub fn rhs_p_calabi_euclidean(t: &Triangulation, state: &GeometryState, p: f64) -> Result<Vec<f64>, FlowError> {
    require(state, Background::Euclidean, FlowKind::PCalabi)?;
    Ok(p_laplacian(t, &state.b, state.k(), p))
}

/// `u' = Delta_p K - A K`.
pub fn rhs_p_calabi_hyperbolic(t: &Triangulation, state: &GeometryState, p: f64) -> Result<Vec<f64>, FlowError> {
    require(state, Background::Hyperbolic, FlowKind::PCalabi)?;
    let a = state.a.as_ref().expect("hyperbolic state carries A");
    let mut out = p_laplacian(t, &state.b, state.k(), p);
    for ((o, ai), ki) in out.iter_mut().zip(a).zip(state.k()) {
        *o -= ai * ki;
    }
    Ok(out)
}

/// `u' = -K`, or `k_av - K` when normalized (Euclidean only).
pub fn rhs_ricci(state: &GeometryState, normalized: bool) -> Result<Vec<f64>, FlowError> {
    let shift = if normalized {
        require(state, Background::Euclidean, FlowKind::RicciNormalized)?;
        state.curvatures.k_av
    } else {
        0.0
    };
    Ok(state.k().iter().map(|k| shift - k).collect())
}

/// `u' = p L g` with `g_j = |k_av - K_j|^(p-2) (k_av - K_j)`.
pub fn rhs_p_calabi_normalized(state: &GeometryState, p: f64) -> Result<Vec<f64>, FlowError> {
    require(state, Background::Euclidean, FlowKind::PCalabiNormalized)?;
    let k_av = state.curvatures.k_av;
    let g = nalgebra::DVector::from_iterator(state.k().len(), state.k().iter().map(|k| signed_power(k_av - k, p - 1.0)));
    Ok((&state.l * g * p).iter().copied().collect())
}

/// `u'_i = (Delta_p K)_i / mu_i` with the fixed weights in place of `B`.
pub fn rhs_graph_p_calabi(t: &Triangulation, state: &GeometryState, spec: &FlowSpec) -> Result<Vec<f64>, FlowError> {
    require(state, Background::Euclidean, FlowKind::GraphPCalabi)?;
    let w = spec.fixed_weights.as_ref().ok_or(FlowError::MissingFixedWeights)?;
    let mut out = p_laplacian(t, w, state.k(), spec.p);
    if let Some(mu) = &spec.vertex_measure {
        out.iter_mut().zip(mu).for_each(|(o, m)| *o /= m);
    }
    Ok(out)
}

/// Dispatches on the flow kind.
pub fn rhs(t: &Triangulation, state: &GeometryState, spec: &FlowSpec) -> Result<Vec<f64>, FlowError> {
    match (spec.kind, spec.background) {
        (FlowKind::PCalabi, Background::Euclidean) => rhs_p_calabi_euclidean(t, state, spec.p),
        (FlowKind::PCalabi, Background::Hyperbolic) => rhs_p_calabi_hyperbolic(t, state, spec.p),
        (FlowKind::Ricci, _) => rhs_ricci(state, false),
        (FlowKind::RicciNormalized, _) => rhs_ricci(state, true),
        (FlowKind::PCalabiNormalized, _) => rhs_p_calabi_normalized(state, spec.p),
        (FlowKind::GraphPCalabi, _) => rhs_graph_p_calabi(t, state, spec),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    ExplicitEuler,
    Rk4,
    AdaptiveRk45,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "euler" | "expliciteuler" => Ok(Method::ExplicitEuler),
            "rk4" => Ok(Method::Rk4),
            "rk45" | "adaptiverk45" | "adaptive" | "dopri" => Ok(Method::AdaptiveRk45),
            _ => Err(format!("unknown method `{s}` (expected euler, rk4 or rk45)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Initial (adaptive) or fixed step.
    pub dt: f64,
    pub t_max: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub stop_curvature_tol: f64,
    /// Keep every k-th accepted step (the first and last are always kept).
    pub sample_every: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk45,
            dt: 1e-3,
            t_max: 1e3,
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            stop_curvature_tol: 1e-8,
            sample_every: 1,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(method: Method, dt: f64, t_max: f64) -> Self {
        IntegratorConfig { method, dt, t_max, ..Default::default() }
    }

    fn validate(&self) -> Result<(), FlowError> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.dt) {
            return Err(FlowError::Config("dt must be positive"));
        }
        if !(self.t_max > 0.0) {
            return Err(FlowError::Config("t_max must be positive"));
        }
        if !(pos(self.abs_tol) && pos(self.rel_tol) && pos(self.stop_curvature_tol)) {
            return Err(FlowError::Config("tolerances must be positive"));
        }
        if self.sample_every == 0 {
            return Err(FlowError::Config("sample stride must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Exit {
    Converged,
    HorizonReached,
    BlowUp,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub u: Vec<f64>,
    pub k: Vec<f64>,
    /// Potential relative to the default base point.
    pub potential: f64,
    /// `E_p` (Dirichlet energy for the graph flow).
    pub energy: f64,
    /// `|sum u(t) - sum u(0)|`.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub exit: Exit,
    pub steps_taken: usize,
    pub rejected_steps: usize,
    /// Steps retried because the monitor flagged the proposed state.
    pub monitor_violations: usize,
    pub final_max_curvature_error: f64,
    pub wall_time_seconds: f64,
    pub target: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub exit: Exit,
    pub steps_taken: usize,
    pub final_max_curvature_error: f64,
    pub wall_time_seconds: f64,
    pub monitor_violations: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    pub fn summary(&self) -> FlowSummary {
        FlowSummary {
            exit: self.exit,
            steps_taken: self.steps_taken,
            final_max_curvature_error: self.final_max_curvature_error,
            wall_time_seconds: self.wall_time_seconds,
            monitor_violations: self.monitor_violations,
        }
    }

    /// CSV with header `t,u_0..,K_0..,F,E,drift`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.samples.first().map_or(0, |s| s.u.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("u_{i}")));
        header.extend((0..n).map(|i| format!("K_{i}")));
        header.extend(["F", "E", "drift"].map(String::from));
        writeln!(w, "{}", header.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = std::iter::once(s.t)
                .chain(s.u.iter().copied())
                .chain(s.k.iter().copied())
                .chain([s.potential, s.energy, s.drift])
                .map(|x| format!("{x:.16e}"))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Why a proposed state was refused.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Failure {
    BlowUp,
    Degenerate,
}

impl From<&GeometryError> for Failure {
    fn from(e: &GeometryError) -> Self {
        match e {
            GeometryError::TriangleInequality { .. }
            | GeometryError::DegenerateFace { .. }
            | GeometryError::NegativeArea { .. } => Failure::Degenerate,
            _ => Failure::BlowUp,
        }
    }
}

struct Eval {
    k: Vec<f64>,
    rhs: Vec<f64>,
}

struct Flow<'a> {
    mesh: &'a WeightedMesh,
    spec: &'a FlowSpec,
    target: f64,
}

impl Flow<'_> {
    fn eval(&self, u: &[f64]) -> Result<Eval, Failure> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Failure::BlowUp);
        }
        let metric = metric_from_u(u, self.spec.background).map_err(|e| Failure::from(&e))?;
        let state = GeometryState::assemble(self.mesh, &metric).map_err(|e| Failure::from(&e))?;
        if state.k().iter().any(|&k| !(k < 2.0 * std::f64::consts::PI)) {
            return Err(Failure::BlowUp);
        }
        let rhs = rhs(self.mesh.topology(), &state, self.spec).map_err(|_| Failure::BlowUp)?;
        if rhs.iter().any(|x| !x.is_finite()) {
            return Err(Failure::BlowUp);
        }
        Ok(Eval { k: state.curvatures.k, rhs })
    }

    fn max_error(&self, k: &[f64]) -> f64 {
        k.iter().map(|k| (k - self.target).abs()).fold(0.0, f64::max)
    }

    fn energy(&self, k: &[f64]) -> f64 {
        match &self.spec.fixed_weights {
            Some(w) => energy_dirichlet(self.mesh.topology(), k, w, self.spec.p),
            None => energy_p_calabi(k, self.target, self.spec.p),
        }
    }
}

fn axpy(u: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = u.to_vec();
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += h * c * ki;
        }
    }
    out
}

// Dormand-Prince 5(4) tableau; the last row gives the new point (FSAL).
const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Proposal {
    u: Vec<f64>,
    eval: Eval,
    /// Scaled error norm (adaptive only; 0 otherwise).
    err: f64,
}

fn propose(flow: &Flow, cfg: &IntegratorConfig, u: &[f64], k1: &[f64], h: f64) -> Result<Proposal, Failure> {
    match cfg.method {
        Method::ExplicitEuler => {
            let un = axpy(u, h, &[(1.0, k1)]);
            let eval = flow.eval(&un)?;
            Ok(Proposal { u: un, eval, err: 0.0 })
        }
        Method::Rk4 => {
            let k2 = flow.eval(&axpy(u, h, &[(0.5, k1)]))?.rhs;
            let k3 = flow.eval(&axpy(u, h, &[(0.5, &k2)]))?.rhs;
            let k4 = flow.eval(&axpy(u, h, &[(1.0, &k3)]))?.rhs;
            let un = axpy(u, h, &[(1.0 / 6.0, k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
            let eval = flow.eval(&un)?;
            Ok(Proposal { u: un, eval, err: 0.0 })
        }
        Method::AdaptiveRk45 => {
            let mut ks: Vec<Vec<f64>> = vec![k1.to_vec()];
            let mut last = None;
            for (stage, row) in DP_A.iter().enumerate() {
                let terms: Vec<(f64, &[f64])> = row.iter().zip(&ks).map(|(a, k)| (*a, k.as_slice())).collect();
                let y = axpy(u, h, &terms);
                let ev = flow.eval(&y)?;
                ks.push(ev.rhs.clone());
                if stage == DP_A.len() - 1 {
                    last = Some((y, ev));
                }
            }
            let (un, eval) = last.expect("tableau has stages");
            let scale_u = u.iter().chain(&un).fold(0.0f64, |m, x| m.max(x.abs()));
            let tol = cfg.abs_tol + cfg.rel_tol * scale_u;
            let mut err = 0.0f64;
            for i in 0..u.len() {
                let e: f64 = DP_E.iter().zip(&ks).map(|(c, k)| c * k[i]).sum::<f64>() * h;
                err = err.max(e.abs() / tol);
            }
            Ok(Proposal { u: un, eval, err })
        }
    }
}

/// Integrates the flow from `u0` until convergence, the horizon, or failure.
pub fn integrate(
    m: &WeightedMesh,
    u0: &UCoordinates,
    spec: &FlowSpec,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, FlowError> {
    let started = Instant::now();
    spec.validate(m)?;
    cfg.validate()?;
    if u0.background() != spec.background {
        return Err(FlowError::Background { kind: spec.kind, background: u0.background() });
    }
    if u0.values().len() != m.vertex_count() {
        return Err(FlowError::Length { what: "initial coordinates", expected: m.vertex_count(), got: u0.values().len() });
    }
    let flow = Flow { mesh: m, spec, target: spec.target(m.topology()) };
    let ctx = PotentialContext::new(m, spec.background);

    let mut u = u0.values().to_vec();
    let metric = u0.to_metric()?;
    GeometryState::assemble(m, &metric)?;
    let mut current = flow.eval(&u).map_err(|_| FlowError::NonFinite)?;
    let sum0: f64 = u.iter().sum();
    let mut potential = ctx.value(&u).map_err(|_| FlowError::NonFinite)?;

    let sample = |t: f64, u: &[f64], k: &[f64], potential: f64| Sample {
        t,
        u: u.to_vec(),
        k: k.to_vec(),
        potential,
        energy: flow.energy(k),
        drift: (u.iter().sum::<f64>() - sum0).abs(),
    };

    let mut samples = vec![sample(0.0, &u, &current.k, potential)];
    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut steps = 0;
    let mut rejected = 0;
    let mut violations = 0;

    let exit = loop {
        if flow.max_error(&current.k) < cfg.stop_curvature_tol {
            break Exit::Converged;
        }
        if t >= cfg.t_max || steps >= cfg.max_steps {
            break Exit::HorizonReached;
        }

        let mut h = dt.min(cfg.t_max - t);
        let mut retries = 0;
        let mut failure = None;
        let accepted = loop {
            let attempt = propose(&flow, cfg, &u, &current.rhs, h).and_then(|prop| {
                let df = ctx.segment_integral(&u, &prop.u).map_err(|_| Failure::BlowUp)?;
                Ok((prop, df))
            });
            match attempt {
                Err(f) => {
                    violations += 1;
                    retries += 1;
                    failure = Some(f);
                    if retries > MAX_MONITOR_RETRIES {
                        break None;
                    }
                    h *= 0.5;
                }
                Ok((prop, _)) if prop.err > 1.0 => {
                    rejected += 1;
                    h *= (0.9 * prop.err.powf(-0.2)).clamp(0.2, 1.0);
                    if h < 1e-300 {
                        failure = Some(Failure::Degenerate);
                        break None;
                    }
                }
                Ok((prop, df)) => break Some((prop, df, h)),
            }
        };
        // halving can creep towards a boundary forever; stop when time no longer advances
        let stalled = accepted.as_ref().is_some_and(|(_, _, h)| *h <= MIN_RELATIVE_STEP * t.abs().max(1.0));
        let accepted = if stalled {
            failure.get_or_insert(Failure::Degenerate);
            None
        } else {
            accepted
        };
        let Some((prop, df, h)) = accepted else {
            break match failure {
                Some(Failure::Degenerate) => Exit::Degenerate,
                _ => Exit::BlowUp,
            };
        };

        t += h;
        steps += 1;
        potential += df;
        u = prop.u;
        current = prop.eval;
        dt = match cfg.method {
            Method::AdaptiveRk45 => h * (0.9 * prop.err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0),
            _ => cfg.dt,
        };
        let done = flow.max_error(&current.k) < cfg.stop_curvature_tol || t >= cfg.t_max;
        if steps % cfg.sample_every == 0 || done || steps >= cfg.max_steps {
            samples.push(sample(t, &u, &current.k, potential));
        }
    };

    if samples.last().is_some_and(|s| s.t != t) {
        samples.push(sample(t, &u, &current.k, potential));
    }
    Ok(Trajectory {
        samples,
        exit,
        steps_taken: steps,
        rejected_steps: rejected,
        monitor_violations: violations,
        final_max_curvature_error: flow.max_error(&current.k),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        target: flow.target,
    })
}
