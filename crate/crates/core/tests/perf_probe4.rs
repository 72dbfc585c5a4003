use std::time::Instant;

use curvebounds::enumerate::{enumerate_by_trace, WorkBudget};
use curvebounds::weil::FieldParams;

fn run(q: u64, g: usize, n: i64, cap: u64) {
    let ctx = FieldParams::new(q).unwrap();
    let budget = WorkBudget::new(cap);
    let t = Instant::now();
    let r = enumerate_by_trace(&ctx, g, q as i64 + 1 - n, &budget);
    println!(
        "q={q} g={g} N={n}: result {:?} nodes {} in {:?}",
        r.as_ref().map(|v| v.len()).map_err(|e| e.to_string()),
        budget.used(),
        t.elapsed()
    );
}

#[test]
#[ignore]
fn full_tree_8_9_47() {
    run(8, 9, 47, 2_000_000_000);
}

#[test]
#[ignore]
fn full_tree_9_13_66() {
    run(9, 13, 66, 2_000_000_000);
}

#[test]
#[ignore]
fn full_tree_4_10_28() {
    run(4, 10, 28, 2_000_000_000);
}
