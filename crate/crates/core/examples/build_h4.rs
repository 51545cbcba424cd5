//! Offline job that writes the shipped H4 invariant file.
//!
//! ```text
//! cargo run --release -p chevalley --example build_h4 [out_dir]
//! ```
//!
//! Averages seed monomials over the 14400 exact group elements and writes
//! `H4.json` (default `crates/core/data`).

use std::path::PathBuf;
use std::time::Instant;

use chevalley::coxeter::{build_root_system, generate_group, CoxeterType};
use chevalley::invariants::{reynolds_basis, write_basis_file, InvariantBasis};

fn main() -> chevalley::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")));
    let t = CoxeterType::H4;
    let start = Instant::now();
    let rs = build_root_system(t)?;
    let group = generate_group(&rs, t.order())?;
    eprintln!("group of order {} in {:?}", group.len(), start.elapsed());
    let polys = reynolds_basis(&rs, &group)?;
    eprintln!("invariants in {:?}", start.elapsed());
    let basis = InvariantBasis::new(t, polys)?;
    let path = out.join("H4.json");
    write_basis_file(&path, &basis)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
