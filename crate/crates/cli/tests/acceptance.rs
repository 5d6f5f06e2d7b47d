//! One PASS/FAIL line per acceptance criterion. Tolerances are exact
//! (no mismatch allowed); wall-clock limits are pinned in `suites`.

use subshift_cli::commands::Ctx;
use subshift_cli::suites;

#[test]
fn acceptance_criteria() {
    let ctx = Ctx::default();
    let outcomes = suites::all(&ctx);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert_eq!(outcomes.len(), 7);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
