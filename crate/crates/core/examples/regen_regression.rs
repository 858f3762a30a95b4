//! Rewrites `data/regression.toml` from the current generator.

use ustar_core::gallery::regression::regenerate;

fn main() {
    let file = regenerate().expect("constants");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/regression.toml");
    std::fs::write(path, file.render()).expect("write");
    for c in &file.constants {
        println!("{} = {:e}", c.name, c.value);
    }
}
