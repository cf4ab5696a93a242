//! Case classification, closed-form block plans and outer bounds.
//!
//! Every message vector is split into three blocks of real streams:
//! block 1 is zero-forced at the unintended receiver, block 2 is its
//! `j`-rotated twin (also zero-forced), block 3 is aligned with the other
//! transmitter's interference. Message (1,1) uses `L`, (2,1) `K`, (1,2) `J`
//! and (2,2) `G`. In the receive-rich scenario block 1 is aligned through a
//! joint kernel, block 2 is unconstrained, and block 3 is always empty.

mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub use oracle::{oracle_max_dof, oracle_max_dof_as, ORACLE_MAX_ANTENNAS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("{0} fits neither M1>=M2>=N1>=N2 nor N1>=N2>=M1>=M2")]
    Ordering(AntennaConfig),
    #[error("{cfg} ({case}) admits no plan with every message carrying a stream")]
    Unsupported { cfg: AntennaConfig, case: Case },
    #[error("{0} exceeds the oracle enumeration bound of {ORACLE_MAX_ANTENNAS} antennas")]
    OracleScope(AntennaConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub m1: u32,
    pub m2: u32,
    pub n1: u32,
    pub n2: u32,
}

impl AntennaConfig {
    pub const fn new(m1: u32, m2: u32, n1: u32, n2: u32) -> Self {
        AntennaConfig { m1, m2, n1, n2 }
    }

    /// Exchange the roles of transmitters and receivers.
    pub fn swapped(&self) -> Self {
        AntennaConfig::new(self.n1, self.n2, self.m1, self.m2)
    }

    pub fn fits(&self, scenario: Scenario) -> bool {
        let AntennaConfig { m1, m2, n1, n2 } = *self;
        if n2 == 0 || m2 == 0 {
            return false;
        }
        match scenario {
            Scenario::TransmitRich => m1 >= m2 && m2 >= n1 && n1 >= n2,
            Scenario::ReceiveRich => n1 >= n2 && n2 >= m1 && m1 >= m2,
        }
    }

    pub fn max_antennas(&self) -> u32 {
        self.m1.max(self.m2).max(self.n1).max(self.n2)
    }

    /// Every config with all counts in `1..=k` that fits either ordering,
    /// sorted lexicographically.
    pub fn enumerate(k: u32) -> Vec<AntennaConfig> {
        let mut out = Vec::new();
        for m1 in 1..=k {
            for m2 in 1..=k {
                for n1 in 1..=k {
                    for n2 in 1..=k {
                        let c = AntennaConfig::new(m1, m2, n1, n2);
                        if c.fits(Scenario::TransmitRich) || c.fits(Scenario::ReceiveRich) {
                            out.push(c);
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.m1, self.m2, self.n1, self.n2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    TransmitRich,
    ReceiveRich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    A,
    B1,
    B2,
    B3,
    C,
    APrime,
    B1Prime,
    B2Prime,
    B3Prime,
    CPrime,
}

impl Case {
    pub fn scenario(&self) -> Scenario {
        match self {
            Case::A | Case::B1 | Case::B2 | Case::B3 | Case::C => Scenario::TransmitRich,
            _ => Scenario::ReceiveRich,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B1 => "B1",
            Case::B2 => "B2",
            Case::B3 => "B3",
            Case::C => "C",
            Case::APrime => "A'",
            Case::B1Prime => "B1'",
            Case::B2Prime => "B2'",
            Case::B3Prime => "B3'",
            Case::CPrime => "C'",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseTag {
    pub scenario: Scenario,
    pub case: Case,
    /// `3N2 − (M1+M2)` for C, `3M2 − (N1+N2)` for C′.
    pub x: Option<u32>,
    /// False for the degenerate geometries where no plan gives every
    /// message at least one stream (B1/C with N1 = 1 and their mirrors).
    pub supported: bool,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.case)?;
        if let Some(x) = self.x {
            write!(f, " (x={x})")?;
        }
        if !self.supported {
            write!(f, " unsupported")?;
        }
        Ok(())
    }
}

/// Classify, preferring the transmit-rich reading when a config fits both
/// orderings (all four counts equal).
pub fn classify(cfg: &AntennaConfig) -> Result<CaseTag, PlanError> {
    if cfg.fits(Scenario::TransmitRich) {
        classify_as(cfg, Scenario::TransmitRich)
    } else {
        classify_as(cfg, Scenario::ReceiveRich)
    }
}

pub fn classify_as(cfg: &AntennaConfig, scenario: Scenario) -> Result<CaseTag, PlanError> {
    if !cfg.fits(scenario) {
        return Err(PlanError::Ordering(*cfg));
    }
    // Receive-rich mirrors transmit-rich with M and N exchanged.
    let (a1, a2, b1, b2) = match scenario {
        Scenario::TransmitRich => (cfg.m1, cfg.m2, cfg.n1, cfg.n2),
        Scenario::ReceiveRich => (cfg.n1, cfg.n2, cfg.m1, cfg.m2),
    };
    let prime = scenario == Scenario::ReceiveRich;
    let pick = |tx: Case, rx: Case| if prime { rx } else { tx };
    let (case, x) = if a1 + a2 >= 2 * b1 + b2 {
        let c = if a2 == b1 && b1 == b2 {
            pick(Case::B1, Case::B1Prime)
        } else if a2 == b1 {
            pick(Case::B2, Case::B2Prime)
        } else {
            pick(Case::B3, Case::B3Prime)
        };
        (c, None)
    } else if a1 + a2 > 3 * b2 {
        (pick(Case::A, Case::APrime), None)
    } else {
        (pick(Case::C, Case::CPrime), Some(3 * b2 - a1 - a2))
    };
    let degenerate = matches!(case, Case::B1 | Case::C | Case::B1Prime | Case::CPrime) && b1 == 1;
    Ok(CaseTag {
        scenario,
        case,
        x,
        supported: !degenerate,
    })
}

pub fn outer_bound(cfg: &AntennaConfig, tag: &CaseTag) -> Result<Rational, PlanError> {
    if !tag.supported {
        return Err(PlanError::Unsupported {
            cfg: *cfg,
            case: tag.case,
        });
    }
    let (m1, m2, n1, n2) = (cfg.m1 as i64, cfg.m2 as i64, cfg.n1 as i64, cfg.n2 as i64);
    Ok(match tag.case {
        Case::A => Rational::new(m1 + m2 + n2, 2),
        Case::B1 | Case::B2 | Case::B3 => Rational::integer(n1 + n2),
        Case::C => Rational::new(2 * (m1 + m2), 3),
        Case::APrime => Rational::new(n1 + n2 + m2, 2),
        Case::B1Prime | Case::B2Prime | Case::B3Prime => Rational::integer(m1 + m2),
        Case::CPrime => Rational::new(2 * (n1 + n2), 3),
    })
}

/// Block lengths for the four messages, `[block1, block2, block3]` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Blocks {
    pub l: [u32; 3],
    pub k: [u32; 3],
    pub j: [u32; 3],
    pub g: [u32; 3],
}

impl Blocks {
    /// Streams of message `(r, t)`.
    pub fn message(&self, r: usize, t: usize) -> [u32; 3] {
        match (r, t) {
            (1, 1) => self.l,
            (2, 1) => self.k,
            (1, 2) => self.j,
            (2, 2) => self.g,
            _ => panic!("no message ({r},{t})"),
        }
    }

    pub fn q(&self, r: usize, t: usize) -> u32 {
        self.message(r, t).iter().sum()
    }

    pub fn total(&self) -> u32 {
        [self.l, self.k, self.j, self.g].iter().flatten().sum()
    }

    fn from_signed(v: [[i64; 3]; 4]) -> Option<Blocks> {
        let conv = |a: [i64; 3]| -> Option<[u32; 3]> {
            let mut out = [0u32; 3];
            for (o, x) in out.iter_mut().zip(a) {
                *o = u32::try_from(x).ok()?;
            }
            Some(out)
        };
        Some(Blocks {
            l: conv(v[0])?,
            k: conv(v[1])?,
            j: conv(v[2])?,
            g: conv(v[3])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub cfg: AntennaConfig,
    pub tag: CaseTag,
    pub blocks: Blocks,
    pub q11: u32,
    pub q21: u32,
    pub q12: u32,
    pub q22: u32,
    pub dof: Rational,
    pub outer_bound: Rational,
}

impl BlockPlan {
    pub fn gap(&self) -> Rational {
        self.outer_bound - self.dof
    }

    pub fn scenario(&self) -> Scenario {
        self.tag.scenario
    }
}

/// Classify and plan in one step.
pub fn plan(cfg: &AntennaConfig) -> Result<BlockPlan, PlanError> {
    plan_blocks(cfg, &classify(cfg)?)
}

pub fn plan_blocks(cfg: &AntennaConfig, tag: &CaseTag) -> Result<BlockPlan, PlanError> {
    let unsupported = PlanError::Unsupported {
        cfg: *cfg,
        case: tag.case,
    };
    if !tag.supported {
        return Err(unsupported);
    }
    let signed = match tag.scenario {
        Scenario::TransmitRich => transmit_rich_blocks(cfg, tag.case),
        Scenario::ReceiveRich => receive_rich_blocks(cfg, tag.case),
    };
    let blocks = Blocks::from_signed(signed).ok_or(unsupported)?;
    Ok(BlockPlan {
        cfg: *cfg,
        tag: *tag,
        blocks,
        q11: blocks.q(1, 1),
        q21: blocks.q(2, 1),
        q12: blocks.q(1, 2),
        q22: blocks.q(2, 2),
        dof: Rational::halves(blocks.total() as usize),
        outer_bound: outer_bound(cfg, tag)?,
    })
}

fn ceil_half(n: i64) -> i64 {
    (n + 1).div_euclid(2)
}

fn floor_half(n: i64) -> i64 {
    n.div_euclid(2)
}

/// Rows are `[L, K, J, G]`.
fn transmit_rich_blocks(cfg: &AntennaConfig, case: Case) -> [[i64; 3]; 4] {
    let (m1, m2, n1, n2) = (cfg.m1 as i64, cfg.m2 as i64, cfg.n1 as i64, cfg.n2 as i64);
    match case {
        Case::A => {
            let k = m1 - n1;
            let g = m2 - n1;
            let j = m2 - n2;
            let third = 2 * n1 + n2 - m1 - m2;
            let span = m1 - m2 + n2;
            [
                [ceil_half(span), floor_half(span), 0],
                [k, k, third],
                [j, j, 0],
                [g, g, third],
            ]
        }
        Case::B1 => [
            [n1 - 1, n1 - 2, 1],
            [n2 - 1, n2 - 2, 1],
            [0, 0, 1],
            [0, 0, 1],
        ],
        Case::B2 => [
            [n2, n2 - 1, 0],
            [n2 - 1, n2 - 1, 1],
            [m2 - n2, m2 - n2, 0],
            [0, 0, 1],
        ],
        Case::B3 => {
            let (g, k) = if 2 * (m2 - n1) >= n2 {
                (
                    [ceil_half(n2), floor_half(n2)],
                    [ceil_half(n2), floor_half(n2)],
                )
            } else {
                ([m2 - n1, m2 - n1], [n1 + n2 - m2, n1 + n2 - m2])
            };
            let (l, j) = if 2 * (m2 - n2) >= n1 {
                (
                    [ceil_half(n1), floor_half(n1)],
                    [ceil_half(n1), floor_half(n1)],
                )
            } else {
                ([n1 + n2 - m2, n1 + n2 - m2], [m2 - n2, m2 - n2])
            };
            [
                [l[0], l[1], 0],
                [k[0], k[1], 0],
                [j[0], j[1], 0],
                [g[0], g[1], 0],
            ]
        }
        Case::C => {
            let x = 3 * n2 - m1 - m2;
            let l3 = (2 * x).div_euclid(3);
            let k3 = 2 * (n1 - n2) + l3;
            let g3 = 2 * n1 + n2 - m1 - m2 - x.div_euclid(3);
            // x - ceil((x-1)/3), written without a negative numerator.
            let j3 = x - (x + 1).div_euclid(3);
            [
                [m1 - n2, m1 - n2, l3],
                [m1 - n1, m1 - n1, k3],
                [m2 - n2, m2 - n2, j3],
                [m2 - n1, m2 - n1, g3],
            ]
        }
        _ => unreachable!("receive-rich case in transmit-rich planner"),
    }
}

fn receive_rich_blocks(cfg: &AntennaConfig, case: Case) -> [[i64; 3]; 4] {
    let (m1, m2, n1, n2) = (cfg.m1 as i64, cfg.m2 as i64, cfg.n1 as i64, cfg.n2 as i64);
    // (l1, l2, k1, k2, j1, j2, g1, g2)
    let (l1, l2, k1, k2, j1, j2, g1, g2) = match case {
        Case::APrime => {
            let kg = n2 - n1 + m2;
            let lj = n1 - n2 + m2;
            (lj, 0, kg, n1 + n2 - 3 * m2, lj, 0, kg, 0)
        }
        Case::B1Prime => (2 * m2 - 2, 0, 0, 1, 2 * m2 - 2, 0, 0, 1),
        Case::B2Prime => (2 * m2 - 1, 0, 0, 2 * (n2 - m2), 2 * m2 - 1, 0, 0, 1),
        Case::B3Prime => {
            // Kernel-limited aligned pairs first, then fill each transmitter
            // up to the receiver budgets with unaligned streams.
            let p = (2 * m1 + 2 * m2 - 2 * n1).max(0);
            let q = (2 * m1 + 2 * m2 - 2 * n2).max(0);
            let a = (2 * (n2 - m2)).min(m1);
            let b = (2 * (n2 - m1)).min(m2);
            (q, 2 * m1 - a - q, p, a - p, q, 2 * m2 - b - q, p, b - p)
        }
        Case::CPrime => {
            let x = 3 * m2 - n1 - n2;
            let k = x.div_euclid(3);
            let lj = 2 * (n1 - m2) + (2 * x).div_euclid(3);
            let base = n2 - n1 + m2 - k;
            match x.rem_euclid(3) {
                0 | 1 => (lj, 0, base, 0, lj, 0, base, 0),
                _ => (lj, 0, base - 1, 0, lj, 0, base - 1, 1),
            }
        }
        _ => unreachable!("transmit-rich case in receive-rich planner"),
    };
    [[l1, l2, 0], [k1, k2, 0], [j1, j2, 0], [g1, g2, 0]]
}

/// Which inequalities a transmit-rich tuple is held to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThirdBlockRule {
    /// `K3 = G3`, `L3 = J3`: every aligned stream has a partner.
    Paired,
    /// `K3 <= G3`, `L3 <= J3`: surplus streams on the second transmitter.
    Relaxed,
}

/// Name of the first transmit-rich constraint `b` violates, if any.
pub fn transmit_rich_violation(
    cfg: &AntennaConfig,
    b: &Blocks,
    rule: ThirdBlockRule,
) -> Option<&'static str> {
    let (m1, m2, n1, n2) = (cfg.m1, cfg.m2, cfg.n1, cfg.n2);
    let [l1, l2, l3] = b.l;
    let [k1, k2, k3] = b.k;
    let [j1, j2, j3] = b.j;
    let [g1, g2, g3] = b.g;
    if !(k2 <= k1 && k1 + n1 <= m1) {
        return Some("K2 <= K1 <= M1-N1");
    }
    if !(g2 <= g1 && g1 + n1 <= m2) {
        return Some("G2 <= G1 <= M2-N1");
    }
    if !(j2 <= j1 && j1 + n2 <= m2) {
        return Some("J2 <= J1 <= M2-N2");
    }
    if !(l2 <= l1 && l1 + n2 <= m1) {
        return Some("L2 <= L1 <= M1-N2");
    }
    match rule {
        ThirdBlockRule::Paired if k3 != g3 || l3 != j3 => return Some("K3 = G3, L3 = J3"),
        _ if k3 > g3 || l3 > j3 => return Some("K3 <= G3, L3 <= J3"),
        _ => {}
    }
    if g3 > n1 || j3 > n2 {
        return Some("G3 <= N1, J3 <= N2");
    }
    let d2 = k1 + k2 + k3 + g1 + g2 + g3;
    let d1 = l1 + l2 + l3 + j1 + j2 + j3;
    if d2 + j3 > 2 * n2 {
        return Some("D2 + J3 <= 2N2");
    }
    if d1 + g3 > 2 * n1 {
        return Some("D1 + G3 <= 2N1");
    }
    if [b.l, b.k, b.j, b.g]
        .iter()
        .any(|m| m.iter().sum::<u32>() == 0)
    {
        return Some("every Q >= 1");
    }
    None
}

/// Name of the first receive-rich constraint `b` violates, if any.
pub fn receive_rich_violation(cfg: &AntennaConfig, b: &Blocks) -> Option<&'static str> {
    let (m1, m2, n1, n2) = (cfg.m1 as i64, cfg.m2 as i64, cfg.n1 as i64, cfg.n2 as i64);
    let v = |a: [u32; 3]| a.map(i64::from);
    let [l1, l2, l3] = v(b.l);
    let [k1, k2, k3] = v(b.k);
    let [j1, j2, j3] = v(b.j);
    let [g1, g2, g3] = v(b.g);
    if l3 + k3 + j3 + g3 != 0 {
        return Some("third blocks empty");
    }
    if k1 != g1 || l1 != j1 {
        return Some("K1' = G1', L1' = J1'");
    }
    if k1 > (2 * m1 + 2 * m2 - 2 * n1).max(0) {
        return Some("K1' <= nullity at R1");
    }
    if l1 > (2 * m1 + 2 * m2 - 2 * n2).max(0) {
        return Some("L1' <= nullity at R2");
    }
    if l1 + l2 + k1 + k2 > 2 * m1 {
        return Some("Q11' + Q21' <= 2M1");
    }
    if j1 + j2 + g1 + g2 > 2 * m2 {
        return Some("Q12' + Q22' <= 2M2");
    }
    if l1 + l2 + j1 + j2 + k1 + k2 + g2 > 2 * n1 {
        return Some("receiver 1 budget");
    }
    if k1 + k2 + g1 + g2 + l1 + l2 + j2 > 2 * n2 {
        return Some("receiver 2 budget");
    }
    if [l1 + l2, k1 + k2, j1 + j2, g1 + g2].contains(&0) {
        return Some("every Q >= 1");
    }
    None
}

/// Check a plan against its scenario's constraint set (C uses the relaxed
/// third-block rule, the other transmit-rich cases the paired one).
pub fn plan_violation(plan: &BlockPlan) -> Option<&'static str> {
    match plan.tag.case {
        Case::C => transmit_rich_violation(&plan.cfg, &plan.blocks, ThirdBlockRule::Relaxed),
        Case::A | Case::B1 | Case::B2 | Case::B3 => {
            transmit_rich_violation(&plan.cfg, &plan.blocks, ThirdBlockRule::Paired)
        }
        _ => receive_rich_violation(&plan.cfg, &plan.blocks),
    }
}
