//! Runs every acceptance criterion once and prints one line per criterion.
//! A criterion passes when its check holds and it stays inside its runtime
//! budget.

use harnack_lab::verify::{runtime_limit, verify_suite, VerifyOptions};

#[test]
fn acceptance_criteria() {
    let summary = verify_suite(&VerifyOptions::default());
    let mut failed = Vec::new();
    for c in &summary.criteria {
        let secs = summary.seconds(c.id).unwrap_or(0.0);
        let in_time = runtime_limit(c.id).is_none_or(|l| secs <= l);
        let ok = c.pass && in_time;
        let limit = runtime_limit(c.id).map_or(String::new(), |l| format!(", limit {l:.0} s"));
        println!(
            "criterion {:>2}: {} {} ({secs:.1} s{limit}){}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            if in_time { "" } else { " over budget" }
        );
        if !ok {
            println!("    measured: {}", c.measured);
            println!("    tolerance: {}", c.tolerance);
            failed.push(c.id);
        }
    }
    assert_eq!(summary.criteria.len(), 10);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
