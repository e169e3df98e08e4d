use gog::builders::*;
use gog::config::Bounds;
use gog::oracle::*;
use gog::word::word;
use std::collections::BTreeMap;

fn main() {
    let g = double_xy_uv();
    let h = double_free("p", "q", "r", "s", &word("p^2 q^3"), &word("r^2 s^3"));
    let b = Bounds { budget: 400_000, ..Bounds::default() };
    match brute_iso_oracle(&g, &h, 2, &b, &BTreeMap::new()) {
        OracleOutcome::Iso(_) => println!("iso"),
        OracleOutcome::NoEvidence(r) => println!("no evidence: {r}"),
    }
}
