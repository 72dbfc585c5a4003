use std::time::Instant;

use curvebounds::eliminate::{analyze, AnalyzeOptions};
use curvebounds::weil::FieldParams;

fn run(q: u64, g: usize, n: u64) {
    let ctx = FieldParams::new(q).unwrap();
    let t = Instant::now();
    let r = analyze(&ctx, g, n, &AnalyzeOptions::default());
    match r {
        Ok(rep) => println!(
            "q={q} g={g} N={n}: {:?} candidates {} in {:?}",
            rep.conclusion,
            rep.candidates.len(),
            t.elapsed()
        ),
        Err(e) => println!("q={q} g={g} N={n}: error {e} in {:?}", t.elapsed()),
    }
}

#[test]
#[ignore]
fn analyze_8_9_47() {
    run(8, 9, 47);
}

#[test]
#[ignore]
fn analyze_4_10_28() {
    run(4, 10, 28);
}

#[test]
#[ignore]
fn analyze_9_13_66() {
    run(9, 13, 66);
}
