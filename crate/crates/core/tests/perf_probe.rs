use std::time::Instant;

use curvebounds::enumerate::deficiency_table_capped;

#[test]
#[ignore]
fn time_deficiency_tables() {
    for (def, deg) in [(4u32, 8usize), (5, 6), (5, 7), (5, 8), (5, 9), (5, 10)] {
        let t = Instant::now();
        let entries = deficiency_table_capped(def, deg);
        println!(
            "def<={def} deg<={deg}: {} entries in {:?}",
            entries.len(),
            t.elapsed()
        );
    }
}
