//! `holonomy`: membership survey of random loop holonomies.

use ustar_core::chart::Chart;
use ustar_core::gallery::GalleryEntry;
use ustar_core::linalg::Mat;
use ustar_core::probe::{holonomy_survey, parallel_transport, survey_loop, SurveyOptions};
use ustar_core::qk2ustar::{flat_triple, modified_connection, ModifiedConnection, QkData};
use ustar_core::report::CheckRecord;
use ustar_core::tensorcalc::connection::ExplicitConnection;
use ustar_core::tensorcalc::{Christoffel, Connection, LeviCivita};

use crate::config::SuiteConfig;
use crate::output::Envelope;
use crate::Failure;

pub const DEFAULT_LOOPS: usize = 200;
/// Identity tolerance for the flat control.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionKind {
    /// The torsion-free U*(2m) connection built from the Killing field.
    Modified,
    /// The Levi-Civita connection (negative control).
    LeviCivita,
    /// The modification of the flat connection with α = 0 and the constant
    /// triple (trivial control).
    FlatControl,
}

fn centre(e: &GalleryEntry) -> Vec<f64> {
    e.ranges.iter().map(|(a, b)| 0.5 * (a + b)).collect()
}

fn calibrated(e: &GalleryEntry, cfg: &SuiteConfig) -> Result<QkData, Failure> {
    let k = e
        .killing
        .clone()
        .ok_or_else(|| Failure::Usage(format!("NoKillingField: entry `{}` carries no Killing field", e.id)))?;
    let d = QkData::new(e.metric.clone(), k, e.orientation).map_err(|err| Failure::Usage(err.to_string()))?;
    Ok(d.calibrate(&e.sample(10, cfg.seed)).map_err(super::runtime)?.0)
}

pub fn run(cfg: &SuiteConfig, loops: Option<usize>, kind: ConnectionKind, base: Option<&[f64]>) -> Result<bool, Failure> {
    let e = super::entry(cfg)?;
    let base = base.map(|b| b.to_vec()).unwrap_or_else(|| centre(&e));
    if base.len() != e.dim() {
        return Err(Failure::Usage(format!("base point has {} coordinates, entry `{}` has {}", base.len(), e.id, e.dim())));
    }
    if !e.chart().contains(&base) {
        return Err(Failure::Usage(format!("base point {base:?} is outside the chart of `{}`", e.id)));
    }
    let mut opts = SurveyOptions { n_loops: loops.unwrap_or(DEFAULT_LOOPS), seed: cfg.seed, ..Default::default() };
    if let Some(t) = cfg.tol {
        opts.membership_tol = t;
    }
    let g = e.metric.eval(&base).map_err(super::runtime)?;
    let (conn, triple): (Box<dyn Connection>, [Mat<f64>; 3]) = match kind {
        ConnectionKind::Modified | ConnectionKind::LeviCivita => {
            let d = calibrated(&e, cfg)?;
            let triple = d.triple(&base).map_err(super::runtime)?;
            let conn: Box<dyn Connection> = match kind {
                ConnectionKind::Modified => Box::new(ModifiedConnection::new(d)),
                _ => Box::new(LeviCivita::new(e.metric.clone())),
            };
            (conn, triple)
        }
        ConnectionKind::FlatControl => {
            let n = e.dim();
            if n % 4 != 0 {
                return Err(Failure::Usage(format!("flat control needs dimension 4m, entry `{}` has {n}", e.id)));
            }
            let triple = flat_triple(n / 4);
            let t = triple.clone();
            let chart = Chart::euclidean("flat_control", n);
            let conn = ExplicitConnection::new(chart, move |_| {
                modified_connection(&Christoffel::zeros(n), &vec![0.0; n], &t).expect("constant triple")
            });
            (Box::new(conn), triple)
        }
    };
    // flat control runs in the identity frame so the constant triple is orthonormal
    let frame_metric = if kind == ConnectionKind::FlatControl { Mat::identity(e.dim()) } else { g };
    let (survey, defects) = holonomy_survey(conn.as_ref(), &frame_metric, &triple, &base, &opts).map_err(super::runtime)?;
    let mut env = Envelope::new("holonomy", cfg);
    env.insert("connection", kind);
    env.insert("base", &base);
    env.insert("survey", &survey);
    env.insert("defects", &defects);
    let worst = defects.iter().cloned().fold(0.0, f64::max);
    env.checks.push(
        CheckRecord::new("u_star_membership", worst, Vec::new(), opts.membership_tol)
            .with_note(format!("pass fraction {}", survey.pass_fraction)),
    );
    if kind == ConnectionKind::FlatControl {
        let mut id = 0.0f64;
        for k in 0..opts.n_loops {
            let lp = survey_loop(&base, k, &opts).map_err(super::runtime)?;
            let h = parallel_transport(conn.as_ref(), &lp, opts.tol).map_err(super::runtime)?;
            id = id.max(h.matrix.sub(&Mat::identity(e.dim())).max_abs());
        }
        env.checks.push(CheckRecord::new("identity", id, Vec::new(), IDENTITY_TOL));
    }
    env.write(cfg.format, cfg.out.as_deref())?;
    Ok(env.pass())
}
