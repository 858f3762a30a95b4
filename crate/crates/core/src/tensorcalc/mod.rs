//! Charts, fields and exact tensor calculus on them.

pub mod connection;
pub mod curvature;
pub mod fd;
pub mod fields;
pub mod forms;
pub mod metric;
pub mod ops;

pub use connection::{christoffel_from, levi_civita, Christoffel, Connection, LeviCivita};
pub use curvature::{metric_curvature, ricci_scalar, riemann, riemann_fd, MetricCurvature, Riemann};
pub use fields::{EndomorphismField, ScalarField, VectorField};
pub use forms::{ext_d, Form, FormField};
pub use metric::{MetricField, MetricJets, DEGENERACY_TOL, DERIV_TOL};
pub use ops::{flat, killing_residual, musical, sharp, Musical};
