use std::time::Instant;

use tgalab::propcheck::{render_table, run_suite, suite_exit_code, CATALOG};
use tgalab::Tier;

#[test]
fn fast_suite_passes_and_is_deterministic() {
    let start = Instant::now();
    let first = run_suite(Tier::Fast, 42);
    let elapsed = start.elapsed();
    println!("{}", render_table(&first));
    println!("fast tier: {:.1} s", elapsed.as_secs_f64());
    assert_eq!(first.len(), CATALOG.len());
    for r in &first {
        assert!(r.passed(), "{} failed: {}", r.check_id, serde_json::to_string(&r.witnesses).unwrap());
    }
    assert_eq!(suite_exit_code(&first), 0);
    let second = run_suite(Tier::Fast, 42);
    assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&second).unwrap());
}
