//! Runs every acceptance check and prints one line per check.

use hcfam::suite::{run, Profile};

#[test]
fn acceptance() {
    let reports = run(Profile::Full);
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
