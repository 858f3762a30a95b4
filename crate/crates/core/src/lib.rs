//! Numerical differential geometry for quaternionic Kähler manifolds with
//! circle actions and the torsion-free `U*(2m)` connections built from them.

pub mod chart;
pub mod error;
pub mod gallery;
pub mod groups;
pub mod hkqk;
pub mod jet;
pub mod linalg;
pub mod probe;
pub mod qk2ustar;
pub mod report;
pub mod structures;
pub mod tensorcalc;

pub use chart::Chart;
pub use error::{GeomError, Result};
pub use jet::{Differentiable, Jet1, Jet2, Scalar};
pub use linalg::Mat;
