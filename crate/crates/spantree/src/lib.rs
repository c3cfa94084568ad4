//! Planar truss design synthesis by grammar-constrained tree search.
//!
//! The library grows statically determinate trusses on an integer grid. Two
//! grammar operators generate candidate members, a direct-stiffness solver
//! scores each design by its worst nodal displacement, and a Monte Carlo
//! tree search steers the sequence of construction decisions toward designs
//! that minimize that displacement. An exhaustive enumerator provides ground
//! truth on small domains, and a benchmark harness wraps the whole thing in
//! reproducible multi-run experiments.
//!
//! ```
//! use spantree::bench::builtin_case;
//! use spantree::env::TrussEnv;
//! use spantree::mcts::{train, SearchConfig};
//!
//! let case = builtin_case("case1").unwrap();
//! let env = TrussEnv::new(case.domain, case.properties, case.seed).unwrap();
//! let cfg = SearchConfig { episodes: 40, rng_seed: 7, ..case.search };
//! let result = train(&env, &cfg).unwrap();
//! assert!(result.best.is_some());
//! ```

pub mod bench;
pub mod env;
pub mod fe;
pub mod geometry;
pub mod grammar;
pub mod mcts;
pub mod model;
pub mod oracle;
pub mod render;

pub use env::TrussEnv;
pub use geometry::{Point, Rect, Segment};
pub use model::{Configuration, DesignDomain, Element, ElementProperties};
