//! Torsion-free `U*(2m)` connections from a quaternionic Kähler metric with a
//! Killing field: moment section, `α = −½ d log μ₁`, and the modified
//! connection.

pub mod connection;
pub mod moment;

pub use connection::{
    conformal_modification, flat_triple, modification_tensor, modification_trace, modified_connection,
    parallel_residual, trace_check, trace_report, verify_ustar, volume_residual, ModifiedConnection, TraceCheck,
};
pub use moment::{
    alpha_from_moment, moment_section_4d, rotated_frame, rotation_with_first_row, AlphaForm, Calibration,
    MomentResiduals, MomentSection, QkData, CALIBRATION_TOL, KILLING_TOL, ZERO_MOMENT_TOL,
};
