//! Numerical certification of a precoder set: nulling, `j`-pairing,
//! alignment, transmitter and receiver ranks, dimension budgets, and the DoF
//! actually delivered.
//!
//! At receiver `r` the desired messages are `(r,1)` and `(r,2)`; the other
//! two interfere. In the transmit-rich scenario their V and W blocks must be
//! nulled and their U blocks arrive in aligned pairs (index by index; any
//! surplus is unaligned). In the receive-rich scenario the V blocks arrive
//! in aligned pairs and the W blocks are unaligned.

use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{BlockPlan, Scenario};
use crate::rational::Rational;
use crate::realmap::{
    colinearity_residual, column_conditioning, hstack, jrotate, numeric_rank, pseudo_solve,
    realify_matrix, realify_vector, CVector, RMatrix, RVector, TolerancePolicy,
};
use crate::synth::{generate_channels, synthesize, ChannelSet, PrecoderSet, SynthError};

/// Mixed into a channel seed to derive the precoder seed in [`certify`].
pub const SYNTH_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("stacked receive matrix has rank {rank} < {cols} columns")]
    Unsolvable { rank: usize, cols: usize },
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub ok: bool,
    /// Worst relative residual; for rank checks, the smallest singular
    /// value over the largest.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub occupied: usize,
    pub available: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub conditions: BTreeMap<String, Check>,
    pub ranks: BTreeMap<String, usize>,
    pub achieved_dof: Rational,
    pub budget_r1: Budget,
    pub budget_r2: Budget,
}

impl VerificationReport {
    fn ok(&self, name: &str) -> bool {
        self.conditions.get(name).is_some_and(|c| c.ok)
    }

    pub fn nulling_ok(&self) -> bool {
        self.ok("nulling")
    }

    pub fn pairing_ok(&self) -> bool {
        self.ok("pairing")
    }

    pub fn alignment_ok(&self) -> bool {
        self.ok("alignment")
    }

    pub fn tx_rank_ok(&self) -> bool {
        self.ok("tx_rank")
    }

    pub fn rx1_rank_ok(&self) -> bool {
        self.ok("rx1_rank")
    }

    pub fn rx2_rank_ok(&self) -> bool {
        self.ok("rx2_rank")
    }

    pub fn budgets_ok(&self) -> bool {
        self.ok("budget_r1") && self.ok("budget_r2")
    }

    pub fn passed(&self) -> bool {
        self.conditions.values().all(|c| c.ok)
    }

    /// Names of the conditions that failed.
    pub fn failures(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|(_, c)| !c.ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Received real columns at one receiver.
#[derive(Debug, Clone)]
pub struct ReceiverLayout {
    /// `2N_r` rows; message (r,1) then (r,2), each V, W, U.
    pub desired: RMatrix,
    /// One column per planned aligned pair (its leading member), then the
    /// unaligned interference.
    pub interference: RMatrix,
    /// Both members of every aligned pair.
    pub pairs: Vec<(RVector, RVector)>,
    /// Interference that should have been zero-forced, with its
    /// per-vector relative residual.
    pub nulled: Vec<f64>,
    /// Unaligned interference columns.
    pub unaligned: Vec<RVector>,
}

impl ReceiverLayout {
    pub fn stacked(&self) -> RMatrix {
        let rows = self.desired.nrows();
        let cols: Vec<RVector> = self
            .desired
            .column_iter()
            .chain(self.interference.column_iter())
            .map(|c| c.into_owned())
            .collect();
        hstack(&cols, rows)
    }
}

fn nulling_residual(h_bar: &RMatrix, h_norm: f64, v: &CVector) -> f64 {
    let x = realify_vector(v);
    let denom = h_norm * x.norm();
    if denom == 0.0 {
        0.0
    } else {
        (h_bar * x).norm() / denom
    }
}

pub fn receiver_layout(ch: &ChannelSet, pre: &PrecoderSet, r: usize) -> ReceiverLayout {
    let nr = ch.h(r, 1).nrows();
    let hb = [realify_matrix(ch.h(r, 1)), realify_matrix(ch.h(r, 2))];
    let rx = |t: usize, v: &CVector| &hb[t - 1] * realify_vector(v);

    let mut desired = Vec::new();
    for t in [1, 2] {
        desired.extend(pre.message(r, t).all().map(|v| rx(t, v)));
    }

    let o = 3 - r;
    let (a, b) = (pre.message(o, 1), pre.message(o, 2));
    let mut nulled = Vec::new();
    let (lead, follow, mut unaligned): (&[CVector], &[CVector], Vec<RVector>) = match pre.scenario {
        Scenario::TransmitRich => {
            for t in [1, 2] {
                let h = ch.h(r, t).norm();
                let m = pre.message(o, t);
                nulled.extend(
                    m.v.iter()
                        .chain(&m.w)
                        .map(|v| nulling_residual(&hb[t - 1], h, v)),
                );
            }
            (&a.u, &b.u, Vec::new())
        }
        Scenario::ReceiveRich => {
            let free =
                a.w.iter()
                    .map(|v| rx(1, v))
                    .chain(b.w.iter().map(|v| rx(2, v)));
            (&a.v, &b.v, free.collect())
        }
    };
    let n_pairs = lead.len().min(follow.len());
    let pairs: Vec<(RVector, RVector)> = lead
        .iter()
        .zip(follow)
        .map(|(x, y)| (rx(1, x), rx(2, y)))
        .collect();
    unaligned.extend(lead[n_pairs..].iter().map(|v| rx(1, v)));
    unaligned.extend(follow[n_pairs..].iter().map(|v| rx(2, v)));

    let mut interference: Vec<RVector> = pairs.iter().map(|(x, _)| x.clone()).collect();
    interference.extend(unaligned.iter().cloned());
    ReceiverLayout {
        desired: hstack(&desired, 2 * nr),
        interference: hstack(&interference, 2 * nr),
        pairs,
        nulled,
        unaligned,
    }
}

fn check_shapes(ch: &ChannelSet, plan: &BlockPlan, pre: &PrecoderSet) -> Result<(), VerifyError> {
    if ch.cfg() != plan.cfg {
        return Err(VerifyError::Shape(format!(
            "channels are {} but plan is for {}",
            ch.cfg(),
            plan.cfg
        )));
    }
    if pre.scenario != plan.scenario() {
        return Err(VerifyError::Shape(
            "precoder and plan scenarios differ".into(),
        ));
    }
    for (r, t) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let m = pre.message(r, t);
        let got = [m.v.len(), m.w.len(), m.u.len()].map(|x| x as u32);
        if got != plan.blocks.message(r, t) {
            return Err(VerifyError::Shape(format!(
                "message ({r},{t}) has groups {got:?}, plan says {:?}",
                plan.blocks.message(r, t)
            )));
        }
        let mt = ch.h(1, t).ncols();
        if let Some(v) = m.all().find(|v| v.len() != mt) {
            return Err(VerifyError::Shape(format!(
                "message ({r},{t}) has a length-{} precoder, transmitter has {mt} antennas",
                v.len()
            )));
        }
    }
    Ok(())
}

fn warn_if_marginal(name: &str, residual: f64, tol: f64) {
    if residual > tol / 10.0 && residual <= tol {
        warn!("{name}: residual {residual:.3e} within 10x of tolerance {tol:.1e}");
    }
}

fn warn_if_ill_conditioned(name: &str, cond: f64, tol: f64) {
    if cond > tol && cond < 10.0 * tol {
        warn!("{name}: conditioning {cond:.3e} within 10x of rank tolerance {tol:.1e}");
    }
}

pub fn verify_all(
    ch: &ChannelSet,
    plan: &BlockPlan,
    pre: &PrecoderSet,
    pol: &TolerancePolicy,
) -> Result<VerificationReport, VerifyError> {
    check_shapes(ch, plan, pre)?;
    let res_tol = pol.residual_rel_tol;
    let mut conditions = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let layouts = [receiver_layout(ch, pre, 1), receiver_layout(ch, pre, 2)];

    let null_worst = layouts
        .iter()
        .flat_map(|l| l.nulled.iter().copied())
        .fold(0.0f64, f64::max);
    warn_if_marginal("nulling", null_worst, res_tol);
    conditions.insert(
        "nulling".to_string(),
        Check {
            ok: null_worst <= res_tol,
            residual: null_worst,
        },
    );

    let mut pair_worst = 0.0f64;
    if pre.scenario == Scenario::TransmitRich {
        for m in &pre.messages {
            for (v, w) in m.v.iter().zip(&m.w) {
                let rotated =
                    jrotate(&realify_vector(v)).expect("realified vectors have even length");
                pair_worst = pair_worst.max((realify_vector(w) - rotated).amax());
            }
        }
    }
    conditions.insert(
        "pairing".to_string(),
        Check {
            ok: pair_worst == 0.0,
            residual: pair_worst,
        },
    );

    // Colinearity of each aligned pair, plus agreement with the recorded
    // common directions when the construction kept them.
    let mut align_worst = 0.0f64;
    let mut failed_pairs = [0usize; 2];
    for (i, l) in layouts.iter().enumerate() {
        let dirs = if i == 0 {
            &pre.directions_r1
        } else {
            &pre.directions_r2
        };
        for (k, (a, b)) in l.pairs.iter().enumerate() {
            let mut res = colinearity_residual(a, b);
            if let Some(h) = dirs.get(k) {
                res = res.max(colinearity_residual(h, a));
            }
            if res > res_tol {
                failed_pairs[i] += 1;
            }
            align_worst = align_worst.max(res);
        }
    }
    warn_if_marginal("alignment", align_worst, res_tol);
    conditions.insert(
        "alignment".to_string(),
        Check {
            ok: failed_pairs == [0, 0],
            residual: align_worst,
        },
    );

    let mut tx_ok = true;
    let mut tx_cond = 1.0f64;
    for t in [1, 2] {
        let a = pre.transmitter_matrix(t, ch.h(1, t).ncols());
        let rank = numeric_rank(&a, pol);
        ranks.insert(format!("tx{t}"), rank);
        tx_ok &= rank == a.ncols();
        tx_cond = tx_cond.min(column_conditioning(&a));
    }
    warn_if_ill_conditioned("tx_rank", tx_cond, pol.rank_rel_tol);
    conditions.insert(
        "tx_rank".to_string(),
        Check {
            ok: tx_ok,
            residual: tx_cond,
        },
    );

    let mut achieved = 0usize;
    let mut budgets = Vec::new();
    for (i, l) in layouts.iter().enumerate() {
        let r = i + 1;
        let s = l.stacked();
        let rank = numeric_rank(&s, pol);
        let cond = column_conditioning(&s);
        ranks.insert(format!("rx{r}"), rank);
        ranks.insert(format!("rx{r}_desired"), l.desired.ncols());
        warn_if_ill_conditioned(&format!("rx{r}_rank"), cond, pol.rank_rel_tol);
        conditions.insert(
            format!("rx{r}_rank"),
            Check {
                ok: rank == s.ncols(),
                residual: cond,
            },
        );

        // What actually arrives: a misaligned pair costs two dimensions.
        let mut actual: Vec<RVector> = Vec::new();
        for (a, b) in &l.pairs {
            actual.push(a.clone());
            if colinearity_residual(a, b) > res_tol {
                actual.push(b.clone());
            }
        }
        actual.extend(l.unaligned.iter().cloned());
        let rows = l.desired.nrows();
        let interference = hstack(&actual, rows);
        let mut all: Vec<RVector> = l.desired.column_iter().map(|c| c.into_owned()).collect();
        all.extend(actual.iter().cloned());
        let joint = numeric_rank(&hstack(&all, rows), pol);
        let interf = numeric_rank(&interference, pol);
        ranks.insert(format!("rx{r}_interference"), interf);
        achieved += joint - interf;

        let budget = Budget {
            occupied: all.len(),
            available: rows,
        };
        conditions.insert(
            format!("budget_r{r}"),
            Check {
                ok: budget.occupied <= budget.available,
                residual: 0.0,
            },
        );
        budgets.push(budget);
    }

    Ok(VerificationReport {
        conditions,
        ranks,
        achieved_dof: Rational::halves(achieved),
        budget_r1: budgets[0],
        budget_r2: budgets[1],
    })
}

/// Draw channels from `seed`, synthesize, and verify.
pub fn certify(
    plan: &BlockPlan,
    seed: u64,
    pol: &TolerancePolicy,
) -> Result<(ChannelSet, PrecoderSet, VerificationReport), CertifyError> {
    let ch = generate_channels(&plan.cfg, seed);
    let pre = synthesize(&ch, plan, seed ^ SYNTH_SALT)?;
    let rep = verify_all(&ch, plan, &pre, pol)?;
    Ok((ch, pre, rep))
}

/// Linear separator for one receiver, built once and applied to many
/// received vectors.
#[derive(Debug, Clone)]
pub struct ZeroForcer {
    /// Rows of the pseudo-inverse belonging to desired streams.
    filter: RMatrix,
}

impl ZeroForcer {
    pub fn new(
        ch: &ChannelSet,
        pre: &PrecoderSet,
        r: usize,
        pol: &TolerancePolicy,
    ) -> Result<Self, VerifyError> {
        let layout = receiver_layout(ch, pre, r);
        let s = layout.stacked();
        let rank = numeric_rank(&s, pol);
        if rank < s.ncols() {
            return Err(VerifyError::Unsolvable {
                rank,
                cols: s.ncols(),
            });
        }
        let pinv = pseudo_solve(&s, &RMatrix::identity(s.nrows(), s.nrows()), pol);
        Ok(ZeroForcer {
            filter: pinv.rows(0, layout.desired.ncols()).into_owned(),
        })
    }

    pub fn streams(&self) -> usize {
        self.filter.nrows()
    }

    pub fn decode(&self, received: &RVector) -> Result<RVector, VerifyError> {
        if received.len() != self.filter.ncols() {
            return Err(VerifyError::Shape(format!(
                "received vector has length {}, receiver has {} real dimensions",
                received.len(),
                self.filter.ncols()
            )));
        }
        Ok(&self.filter * received)
    }

    /// Per-stream noise amplification: the squared norm of each filter row.
    pub fn noise_gains(&self) -> Vec<f64> {
        self.filter.row_iter().map(|r| r.norm_squared()).collect()
    }
}

/// Least-squares separation at receiver `r`: returns the desired stream
/// coefficients, message (r,1) then (r,2), each in V, W, U order.
pub fn decode_zero_forcing(
    ch: &ChannelSet,
    pre: &PrecoderSet,
    received: &RVector,
    r: usize,
    pol: &TolerancePolicy,
) -> Result<RVector, VerifyError> {
    ZeroForcer::new(ch, pre, r, pol)?.decode(received)
}
