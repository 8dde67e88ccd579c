//! Anchored k-cores: closures, exact solvers, hardness reductions with their
//! gadgets, brute-force oracles, and the text formats used by the `akc` CLI.
//!
//! ```
//! use akc::graph::named::path;
//! use akc::{solve, AkcInstance, Decision, SolveOptions};
//!
//! // Anchoring both ends of a path keeps every vertex in the 2-core.
//! let inst = AkcInstance::new(path(10), 2, 2, 10);
//! let report = solve(&inst, &SolveOptions::default()).unwrap();
//! assert_eq!(report.decision, Decision::Yes);
//! assert_eq!(report.best.anchors.iter().copied().collect::<Vec<_>>(), vec![0, 9]);
//! ```

pub mod bench;
pub mod cnf;
pub mod corpus;
pub mod engagement;
pub mod generators;
pub mod graph;
pub mod io;
pub mod oracles;
pub mod reductions;
pub mod solver;

pub use cnf::{CnfFormula, Literal};
pub use engagement::{
    anchored_closure, k_core, nash_check, verify_solution, AkcInstance, CascadeTrace, Solution, VertexSet,
};
pub use graph::{Graph, GraphBuilder, GraphError, VertexId};
pub use reductions::{embed_witness, extract_witness, reduce, ReducedInstance, ReductionKind};
pub use solver::{solve, solve_branch_bound, solve_exhaustive, Decision, SolveOptions, SolveReport};
