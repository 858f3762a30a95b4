//! Benchmarks for `ustar-core`; see `benches/`.

use ustar_core::gallery::{Manifest, GalleryEntry};

/// Loads a bundled gallery entry.
pub fn entry(id: &str) -> GalleryEntry {
    Manifest::bundled().load(id).expect("bundled entry")
}
