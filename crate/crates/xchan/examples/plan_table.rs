//! The block plan for each worked configuration, plus a receive-rich one and
//! an unsupported one.

use xchan::cli::render_plan;
use xchan::planner::{plan, PlanError};
use xchan::{AntennaConfig, Rational, GOLDEN_EXAMPLES};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:<12} {:<5} {:>6} {:>6} {:>5}",
        "config", "case", "dof", "bound", "gap"
    );
    for ((m1, m2, n1, n2), (num, den)) in GOLDEN_EXAMPLES {
        let p = plan(&AntennaConfig::new(m1, m2, n1, n2))?;
        println!(
            "{:<12} {:<5} {:>6} {:>6} {:>5}",
            p.cfg.to_string(),
            p.tag.case.label(),
            p.dof.to_string(),
            p.outer_bound.to_string(),
            p.gap().to_string()
        );
        if p.dof != Rational::new(num, den) {
            return Err(format!("{}: dof {} != {num}/{den}", p.cfg, p.dof).into());
        }
    }

    println!();
    print!("{}", render_plan(&plan(&AntennaConfig::new(3, 2, 5, 4))?));

    match plan(&AntennaConfig::new(3, 1, 1, 1)) {
        Err(e @ PlanError::Unsupported { .. }) => println!("\n{e}"),
        other => return Err(format!("expected an unsupported geometry, got {other:?}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
