//! Exhaustive search over integer block tuples, independent of the
//! closed-form plans. Loops are bounded by the box constraints and pruned by
//! the receiver budgets; everything else is checked by the same violation
//! predicates the plans are held to.

use super::{
    classify, classify_as, receive_rich_violation, transmit_rich_violation, AntennaConfig, Blocks,
    Case, PlanError, Scenario, ThirdBlockRule,
};
use crate::rational::Rational;

pub const ORACLE_MAX_ANTENNAS: u32 = 8;

/// Largest achievable DoF over all feasible tuples, or `None` when no tuple
/// gives every message a stream.
pub fn oracle_max_dof(cfg: &AntennaConfig) -> Result<Option<Rational>, PlanError> {
    let tag = classify(cfg)?;
    oracle_max_dof_as(cfg, tag.scenario)
}

pub fn oracle_max_dof_as(
    cfg: &AntennaConfig,
    scenario: Scenario,
) -> Result<Option<Rational>, PlanError> {
    if cfg.max_antennas() > ORACLE_MAX_ANTENNAS {
        return Err(PlanError::OracleScope(*cfg));
    }
    let tag = classify_as(cfg, scenario)?;
    let best = match scenario {
        Scenario::TransmitRich => {
            let rule = if tag.case == Case::C {
                ThirdBlockRule::Relaxed
            } else {
                ThirdBlockRule::Paired
            };
            transmit_rich_search(cfg, rule)
        }
        Scenario::ReceiveRich => receive_rich_search(cfg),
    };
    Ok(best.map(|s| Rational::halves(s as usize)))
}

/// Pairs `(x1, x2)` with `x2 <= x1 <= hi`.
fn ordered_pairs(hi: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=hi).flat_map(|a| (0..=a).map(move |b| (a, b)))
}

fn transmit_rich_search(cfg: &AntennaConfig, rule: ThirdBlockRule) -> Option<u32> {
    let (m1, m2, n1, n2) = (cfg.m1, cfg.m2, cfg.n1, cfg.n2);
    let mut best: Option<u32> = None;
    for g3 in 0..=n1 {
        let k3_range = match rule {
            ThirdBlockRule::Paired => g3..=g3,
            ThirdBlockRule::Relaxed => 0..=g3,
        };
        for k3 in k3_range {
            for j3 in 0..=n2 {
                let l3_range = match rule {
                    ThirdBlockRule::Paired => j3..=j3,
                    ThirdBlockRule::Relaxed => 0..=j3,
                };
                for l3 in l3_range {
                    let Some(cap2) = (2 * n2).checked_sub(j3 + k3 + g3) else {
                        continue;
                    };
                    let Some(cap1) = (2 * n1).checked_sub(g3 + l3 + j3) else {
                        continue;
                    };
                    for (k1, k2) in ordered_pairs(m1 - n1) {
                        if k1 + k2 > cap2 {
                            continue;
                        }
                        for (g1, g2) in ordered_pairs(m2 - n1) {
                            if k1 + k2 + g1 + g2 > cap2 {
                                continue;
                            }
                            for (l1, l2) in ordered_pairs(m1 - n2) {
                                if l1 + l2 > cap1 {
                                    continue;
                                }
                                for (j1, j2) in ordered_pairs(m2 - n2) {
                                    if l1 + l2 + j1 + j2 > cap1 {
                                        continue;
                                    }
                                    let b = Blocks {
                                        l: [l1, l2, l3],
                                        k: [k1, k2, k3],
                                        j: [j1, j2, j3],
                                        g: [g1, g2, g3],
                                    };
                                    if transmit_rich_violation(cfg, &b, rule).is_none() {
                                        best = best.max(Some(b.total()));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

fn receive_rich_search(cfg: &AntennaConfig) -> Option<u32> {
    let (m1, m2, n1, n2) = (cfg.m1 as i64, cfg.m2 as i64, cfg.n1 as i64, cfg.n2 as i64);
    let kk = (2 * m1 + 2 * m2 - 2 * n1).max(0) as u32;
    let ll = (2 * m1 + 2 * m2 - 2 * n2).max(0) as u32;
    let (t1, t2) = (2 * cfg.m1, 2 * cfg.m2);
    let mut best: Option<u32> = None;
    for p in 0..=kk {
        for q in 0..=ll {
            for k2 in 0..=t1 {
                for l2 in 0..=t1 {
                    if p + q + k2 + l2 > t1 {
                        break;
                    }
                    for g2 in 0..=t2 {
                        for j2 in 0..=t2 {
                            if p + q + g2 + j2 > t2 {
                                break;
                            }
                            let b = Blocks {
                                l: [q, l2, 0],
                                k: [p, k2, 0],
                                j: [q, j2, 0],
                                g: [p, g2, 0],
                            };
                            if receive_rich_violation(cfg, &b).is_none() {
                                best = best.max(Some(b.total()));
                            }
                        }
                    }
                }
            }
        }
    }
    best
}
