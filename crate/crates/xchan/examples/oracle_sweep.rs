//! Closed-form plans against the brute-force optimum of the same block
//! program, for every configuration with at most five antennas per node.

use std::collections::BTreeMap;

use xchan::planner::oracle_max_dof_as;
use xchan::planner::{plan, PlanError};
use xchan::AntennaConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut per_case: BTreeMap<&str, usize> = BTreeMap::new();
    let mut skipped = 0;
    for cfg in AntennaConfig::enumerate(5) {
        let p = match plan(&cfg) {
            Ok(p) => p,
            Err(PlanError::Unsupported { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let best = oracle_max_dof_as(&cfg, p.scenario())?;
        if best != Some(p.dof) {
            return Err(format!("{cfg}: plan {} vs oracle {best:?}", p.dof).into());
        }
        *per_case.entry(p.tag.case.label()).or_default() += 1;
    }
    for (case, n) in &per_case {
        println!("{case:<4} {n:>4} configs match the oracle");
    }
    println!("{skipped} unsupported geometries skipped");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
