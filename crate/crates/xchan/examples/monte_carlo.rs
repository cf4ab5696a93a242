//! A short SNR sweep: symbol error rate per message and an empirical DoF
//! slope from the zero-forcing rate proxy.

use xchan::sim::{run_trials, TrialConfig};
use xchan::AntennaConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tc = TrialConfig {
        cfg: AntennaConfig::new(4, 4, 3, 2),
        q: 1,
        snr_db: vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
        trials: 40,
        seed: 1,
    };
    let res = run_trials(&tc)?;
    println!(
        "{} case {} planner dof {}",
        res.cfg, res.case, res.planner_dof
    );
    for p in &res.points {
        println!(
            "  {:>4} dB  ser {:.3e}  trials with errors {:>3}  rate proxy {:.2}",
            p.snr_db, p.ser, p.error_trials, p.rate_proxy
        );
    }
    let slope = res.slope.ok_or("need at least two SNR points")?;
    println!("  slope {slope:.3} ({})", res.slope_metric);

    let mut csv = Vec::new();
    res.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
