use std::sync::atomic::Ordering;
use std::time::Instant;

use curvebounds::enumerate::{enumerate_by_trace, WorkBudget, STAGE_SCANNED, STAGE_VALID};
use curvebounds::weil::FieldParams;

#[test]
#[ignore]
fn stage_stats_4_10_28() {
    let cap: u64 = std::env::var("PROBE_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000_000);
    let ctx = FieldParams::new(4).unwrap();
    let budget = WorkBudget::new(cap);
    let t = Instant::now();
    let r = enumerate_by_trace(&ctx, 10, 4 + 1 - 28, &budget);
    println!(
        "result {:?} nodes {} in {:?}",
        r.as_ref().map(|v| v.len()).map_err(|e| e.to_string()),
        budget.used(),
        t.elapsed()
    );
    for k in 0..32 {
        let s = STAGE_SCANNED[k].load(Ordering::Relaxed);
        let v = STAGE_VALID[k].load(Ordering::Relaxed);
        if s > 0 {
            println!("stage {k}: scanned {s} valid {v}");
        }
    }
}
