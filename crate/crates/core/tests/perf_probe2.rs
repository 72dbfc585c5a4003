use std::time::Instant;

use curvebounds::enumerate::{candidates_via, Route, WorkBudget};
use curvebounds::weil::FieldParams;

#[test]
#[ignore]
fn time_trace_route_cases() {
    for (q, g, n) in [(8u64, 9usize, 47u64), (4, 10, 28)] {
        let ctx = FieldParams::new(q).unwrap();
        let t = Instant::now();
        let budget = WorkBudget::new(2_000_000_000);
        let r = candidates_via(&ctx, g, n, Route::Trace, &budget);
        match r {
            Ok(c) => println!(
                "q={q} g={g} N={n}: {} candidates, {} nodes, {:?}",
                c.len(),
                budget.used(),
                t.elapsed()
            ),
            Err(e) => println!(
                "q={q} g={g} N={n}: error {e} after {} nodes, {:?}",
                budget.used(),
                t.elapsed()
            ),
        }
    }
}
