//! Exact computation of restricted configuration spaces of metric graphs.
//!
//! Given a finite connected metric graph with rational edge lengths and a
//! vector of pairwise minimum-distance restraints, this crate builds the
//! regular cell structure of the restricted configuration space as a
//! family of parametric polytopes, computes its topological invariants
//! exactly, and sweeps a one-parameter family of restraints to find every
//! critical value where the combinatorial type changes. All arithmetic is
//! exact rational; nothing here ever rounds.
//!
//! ```
//! use graphconfig_core::{build_complex, sweep_types, MetricGraph, Ray, Restraints, rat};
//!
//! let g = MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap();
//!
//! // two points on a star with pairwise distance >= 1/2: a circle
//! let x = build_complex(&g, 2, &Restraints::scalar(2, rat(1, 2)).unwrap());
//! assert_eq!(x.betti_mod2(), vec![1, 1, 0]);
//!
//! // sweeping the scalar restraint finds the two genuine transitions
//! let s = sweep_types(&g, 2, &Ray::scalar(2).unwrap());
//! let critical: Vec<String> = s
//!     .nonspurious()
//!     .iter()
//!     .map(|c| graphconfig_core::format_rational(&c.t))
//!     .collect();
//! assert_eq!(critical, vec!["1", "2"]);
//! ```

pub mod bounds;
pub mod cells;
pub mod complex;
pub mod gf2;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod report;
pub mod sweep;

pub use cells::{
    all_cells, canonicalize_face, cell_system, face_label_map, inequality_system, maximal_cells,
    CellDescriptor, CellError, CellKey, CellSystem, ConstraintLabel, Spot,
};
pub use complex::{build_complex, ComplexCell, ConfigComplex};
pub use graph::{point_distance, DistanceMatrix, GraphError, GraphPoint, MetricGraph};
pub use polytope::{
    types_equal, AffineRhs, FacePoset, LabelSet, ParametricPolytope, PolytopeError, PolytopeType,
    Restraints,
};
pub use rational::{format_rational, parse_rational, rat, rat_int, Rational};
pub use sweep::{
    critical_candidates, homotopy_invariant_classes, isotopy_class_count, sweep_types,
    CriticalSweep, Ray, SweepError,
};
