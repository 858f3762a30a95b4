//! Complex, Hermitian, Kähler and quaternionic structures.

pub mod almost_complex;
pub mod complex_chart;
pub mod hodge;
pub mod quaternionic;

pub use almost_complex::{
    hermitian_form, kahler_check, nijenhuis, standard_j, structure_from_form, type11_test, AlmostComplexField,
    KahlerResiduals,
};
pub use complex_chart::{
    i_ddbar, i_ddbar_general, i_hermitian_form, kahler_potential_check, realify, ricci_form, ComplexChartMetric, PotentialReport,
};
pub use hodge::{hodge_star_4d, orthonormal_coframe, sd_frame, sd_split, Orientation};
pub use quaternionic::{quaternion_relations_residual, QuaternionicTriple};
