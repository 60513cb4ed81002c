//! Release gate: runs the full self-verification suite and prints one
//! pass/fail line per criterion.

#[test]
fn acceptance_suite() {
    let results = gqm_core::verify::run_all(0xC0FFEE);
    let mut all = true;
    for r in &results {
        println!(
            "criterion {:>2}: {} — {} — {} ({} ms)",
            r.index,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail,
            r.millis
        );
        all &= r.passed;
    }
    assert!(all, "at least one acceptance criterion failed");
}
