//! Hyperkähler and quaternionic Kähler links: hyperkähler triples and the
//! Haydys form, the Swann bundle, and the Calabi quotient.

pub mod hyperkahler;
pub mod calabi;
pub mod swann;

pub use calabi::{moment as calabi_moment, orbit_direction, CalabiSlice, QuotientMetric};
pub use hyperkahler::*;
pub use swann::{euler_angles, euler_rotation, hat, sp1_connection, swann_sample, vee, CurvatureFit, SwannChart, SwannPoint, EULER_MARGIN, FRAME_CONVENTION};
