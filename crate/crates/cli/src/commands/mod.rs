pub mod gallery;
pub mod hk;
pub mod holonomy;
pub mod transform;
pub mod verify;

use ustar_core::gallery::{GalleryEntry, Manifest};

use crate::config::SuiteConfig;
use crate::Failure;

pub fn manifest(path: Option<&std::path::Path>) -> Result<Manifest, Failure> {
    match path {
        None => Ok(Manifest::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("cannot read manifest {}: {e}", p.display())))?;
            Manifest::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

/// Looks the configured entry up; unknown ids are usage errors.
pub fn entry(cfg: &SuiteConfig) -> Result<GalleryEntry, Failure> {
    let m = manifest(cfg.manifest.as_deref())?;
    if m.get(&cfg.entry).is_none() {
        return Err(Failure::Usage(format!("unknown entry `{}`; known: {}", cfg.entry, m.ids().join(", "))));
    }
    m.load(&cfg.entry).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}
