//! Combinatorial p-th Calabi flows for circle packing metrics.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: closed (generalized) triangulations, edge weights, the mesh file
//!   format and the brute-force Euclidean existence checker.
//! - [`geometry`]: edge lengths, corner angles, curvatures and the operator
//!   matrices `B`, `A` and `L = dK/du` with analytic derivatives.
//! - [`dynamics`]: the discrete p-Laplacian, flow right-hand sides, energies and
//!   the time integrator.
//! - [`potential`]: the Ricci potential, its Newton solver and numerical
//!   existence detection.
//! - [`fixtures`]: the bundled test surfaces.
//!
//! Data-parallel loops go through [`exec`], which dispatches to rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dynamics;
pub mod exec;
pub mod fixtures;
pub mod geometry;
pub mod mesh;
pub mod potential;

pub use dynamics::{
    energy_dirichlet, energy_p_calabi, integrate, p_laplacian, Exit, FlowError, FlowKind, FlowSpec,
    IntegratorConfig, Method, Sample, Trajectory,
};
pub use exec::Execution;
pub use geometry::{
    average_curvature, curvatures, Background, Curvatures, GeometryError, GeometryState,
    PackingMetric, UCoordinates,
};
pub use mesh::{
    check_euclidean_condition, euler_characteristic, parse_mesh, parse_radii, subset_link,
    write_mesh, write_radii, EconReport, MeshError, SubsetLink, Triangulation, WeightedMesh,
};
pub use potential::{
    detect_existence, newton_solve, ExistenceReport, NewtonConfig, PotentialContext,
    PotentialError, SolveReport, SolveStatus,
};
