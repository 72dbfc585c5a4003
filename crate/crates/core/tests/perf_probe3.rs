use std::time::Instant;

use curvebounds::enumerate::{enumerate_by_trace, WorkBudget};
use curvebounds::weil::FieldParams;

#[test]
#[ignore]
fn trace_route_node_growth() {
    let ctx = FieldParams::new(8).unwrap();
    for cap in [1_000_000u64, 10_000_000, 100_000_000] {
        let budget = WorkBudget::new(cap);
        let t = Instant::now();
        let r = enumerate_by_trace(&ctx, 9, 8 + 1 - 47, &budget);
        println!(
            "cap {cap}: result {:?} nodes {} in {:?}",
            r.as_ref().map(|v| v.len()).map_err(|e| e.to_string()),
            budget.used(),
            t.elapsed()
        );
    }
}
