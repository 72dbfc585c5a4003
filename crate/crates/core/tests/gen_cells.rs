//! Regenerates the embedded totally-positive cell data.
//!
//! Run with: `cargo test -p curvebounds --test gen_cells -- --ignored --nocapture`
//!
//! The run is incremental: cells already present in the data file are
//! kept, missing ones are searched cheapest-first, and the file is
//! rewritten after each cell completes, so an interrupted run loses at
//! most the cell it was working on.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use curvebounds::enumerate::{compute_cell, parse_cells, write_cells, WorkBudget};
use curvebounds::exact::IntPoly;

#[test]
#[ignore]
fn regen_cells() {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/data/totally_positive_cells.csv");
    let existing = std::fs::read_to_string(&path).unwrap_or_default();
    let mut cells: BTreeMap<(usize, u32), Vec<IntPoly>> =
        parse_cells(&existing).unwrap_or_default();
    // Target cells: everything a deficiency-6 table over degrees <= 10
    // can request.  The two remaining cells (11,6) and (12,6) take days
    // to search and stay on the live-search path.
    let mut targets: Vec<(usize, u32)> = Vec::new();
    for d in 1..=10usize {
        let min_def = if d == 1 { 0 } else { d.div_ceil(2) as u32 };
        for def in min_def..=6u32 {
            targets.push((d, def));
        }
    }
    targets.sort();
    for (d, def) in targets {
        if cells.contains_key(&(d, def)) {
            continue;
        }
        let t = Instant::now();
        let polys = compute_cell(d, def, &WorkBudget::unlimited()).expect("unlimited budget");
        println!("cell {d};{def}: {} polys in {:?}", polys.len(), t.elapsed());
        cells.insert((d, def), polys);
        std::fs::write(&path, write_cells(&cells)).expect("write cell data");
    }
}
