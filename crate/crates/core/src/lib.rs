//! Multigrid reduction in time with weighted C-relaxation, two-level
//! convergence bounds, and dense reference operators.

pub mod error;
pub mod linalg;
pub mod mgrit;
pub mod oracle;
pub mod problems;
pub mod spacetime;
pub mod theory;
pub mod timestepping;

pub use error::{Error, Result};
pub use mgrit::{
    build_hierarchy, sequential_solve, solve, ConvergenceReport, GridHierarchy, HierarchyOptions,
    RateMethod, RelaxPattern, RelaxationSpec, SolveOptions, Solver,
};
pub use problems::{build_adv1d_central, build_adv1d_upwind, build_heat1d, ProblemKind, ProblemSetup};
pub use spacetime::SpaceTimeState;
pub use timestepping::{factor_step, make_tableau, stability_eigenvalue, ButcherTableau, Scheme, StepOperator};
pub use theory::{fcf_bound_exact, fcfcf_bound_numeric, problem_bound, BoundQuery, BoundResult};
