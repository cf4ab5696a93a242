//! Channel generation and precoder construction for a block plan.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use thiserror::Error;

use crate::planner::{AntennaConfig, BlockPlan, Scenario};
use crate::realmap::{
    derealify_vector, hstack, null_space, numeric_rank, realify_matrix, realify_vector,
    solve_exact, CMatrix, CVector, LinalgError, RMatrix, RVector, TolerancePolicy,
};

/// Redraw budget for the random parts of a construction.
pub const MAX_REDRAWS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("kernel has {available} dimensions, plan needs {needed}")]
    PlanInfeasible { needed: usize, available: usize },
    #[error("no full-rank precoder set after {0} draws")]
    Synthesis(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Cross and direct channels; `h(r, t)` has `N_r` rows and `M_t` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h11: CMatrix,
    pub h12: CMatrix,
    pub h21: CMatrix,
    pub h22: CMatrix,
    pub seed: u64,
}

impl ChannelSet {
    pub fn h(&self, r: usize, t: usize) -> &CMatrix {
        match (r, t) {
            (1, 1) => &self.h11,
            (1, 2) => &self.h12,
            (2, 1) => &self.h21,
            (2, 2) => &self.h22,
            _ => panic!("no channel ({r},{t})"),
        }
    }

    pub fn h_mut(&mut self, r: usize, t: usize) -> &mut CMatrix {
        match (r, t) {
            (1, 1) => &mut self.h11,
            (1, 2) => &mut self.h12,
            (2, 1) => &mut self.h21,
            (2, 2) => &mut self.h22,
            _ => panic!("no channel ({r},{t})"),
        }
    }

    /// Antenna counts implied by the matrix shapes.
    pub fn cfg(&self) -> AntennaConfig {
        AntennaConfig::new(
            self.h11.ncols() as u32,
            self.h12.ncols() as u32,
            self.h11.nrows() as u32,
            self.h21.nrows() as u32,
        )
    }
}

/// One circularly-symmetric standard complex Gaussian draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let n = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite std");
    Complex64::new(n.sample(rng), n.sample(rng))
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn generate_channels(cfg: &AntennaConfig, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m1, m2, n1, n2) = (
        cfg.m1 as usize,
        cfg.m2 as usize,
        cfg.n1 as usize,
        cfg.n2 as usize,
    );
    ChannelSet {
        h11: gaussian_matrix(n1, m1, &mut rng),
        h12: gaussian_matrix(n1, m2, &mut rng),
        h21: gaussian_matrix(n2, m1, &mut rng),
        h22: gaussian_matrix(n2, m2, &mut rng),
        seed,
    }
}

/// Precoders of one message, in block order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MessagePrecoders {
    pub v: Vec<CVector>,
    pub w: Vec<CVector>,
    pub u: Vec<CVector>,
}

impl MessagePrecoders {
    pub fn all(&self) -> impl Iterator<Item = &CVector> {
        self.v.iter().chain(&self.w).chain(&self.u)
    }

    pub fn len(&self) -> usize {
        self.v.len() + self.w.len() + self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Index of message `(r, t)` in [`PrecoderSet::messages`]: 11, 21, 12, 22.
pub fn message_index(r: usize, t: usize) -> usize {
    assert!(
        (1..=2).contains(&r) && (1..=2).contains(&t),
        "no message ({r},{t})"
    );
    (r - 1) + 2 * (t - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    pub scenario: Scenario,
    /// Ordered (1,1), (2,1), (1,2), (2,2).
    pub messages: [MessagePrecoders; 4],
    /// Receive-rich only: the common received direction of each aligned pair.
    pub directions_r1: Vec<RVector>,
    pub directions_r2: Vec<RVector>,
}

impl PrecoderSet {
    pub fn message(&self, r: usize, t: usize) -> &MessagePrecoders {
        &self.messages[message_index(r, t)]
    }

    pub fn message_mut(&mut self, r: usize, t: usize) -> &mut MessagePrecoders {
        &mut self.messages[message_index(r, t)]
    }

    /// Realified precoders of message `(r, t)` as columns, V then W then U.
    pub fn realified(&self, r: usize, t: usize, m_t: usize) -> RMatrix {
        let cols: Vec<RVector> = self.message(r, t).all().map(realify_vector).collect();
        hstack(&cols, 2 * m_t)
    }

    /// Everything transmitter `t` sends, messages (1,t) then (2,t).
    pub fn transmitter_matrix(&self, t: usize, m_t: usize) -> RMatrix {
        let cols: Vec<RVector> = self
            .message(1, t)
            .all()
            .chain(self.message(2, t).all())
            .map(realify_vector)
            .collect();
        hstack(&cols, 2 * m_t)
    }
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v.unscale(n)
    }
}

fn random_unit<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CVector {
    unit(CVector::from_fn(m, |_, _| complex_gaussian(rng)))
}

/// `count` random unit-norm combinations of the columns of `basis`.
fn random_in_span<R: Rng + ?Sized>(
    basis: &CMatrix,
    count: usize,
    rng: &mut R,
) -> Result<Vec<CVector>, SynthError> {
    if count > 0 && basis.ncols() == 0 {
        return Err(SynthError::PlanInfeasible {
            needed: count,
            available: 0,
        });
    }
    Ok((0..count)
        .map(|_| {
            let coeffs = CVector::from_fn(basis.ncols(), |_, _| complex_gaussian(rng));
            unit(basis * coeffs)
        })
        .collect())
}

fn as_column(v: &CVector) -> CMatrix {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn j_times(v: &CVector) -> CVector {
    v.map(|z| Complex64::new(-z.im, z.re))
}

fn check_shapes(ch: &ChannelSet, plan: &BlockPlan) -> Result<(), SynthError> {
    let cfg = plan.cfg;
    let want = |r: u32, t: u32| (r as usize, t as usize);
    let pairs = [
        (ch.h(1, 1).shape(), want(cfg.n1, cfg.m1), "H11"),
        (ch.h(1, 2).shape(), want(cfg.n1, cfg.m2), "H12"),
        (ch.h(2, 1).shape(), want(cfg.n2, cfg.m1), "H21"),
        (ch.h(2, 2).shape(), want(cfg.n2, cfg.m2), "H22"),
    ];
    for (got, want, name) in pairs {
        if got != want {
            return Err(SynthError::Shape(format!(
                "{name} is {}x{}, plan {} needs {}x{}",
                got.0, got.1, cfg, want.0, want.1
            )));
        }
    }
    Ok(())
}

fn transmitters_full_rank(set: &PrecoderSet, cfg: &AntennaConfig, pol: &TolerancePolicy) -> bool {
    [(1, cfg.m1), (2, cfg.m2)].iter().all(|&(t, m)| {
        let a = set.transmitter_matrix(t, m as usize);
        numeric_rank(&a, pol) == a.ncols()
    })
}

/// Dispatch on the plan's scenario.
pub fn synthesize(ch: &ChannelSet, plan: &BlockPlan, seed: u64) -> Result<PrecoderSet, SynthError> {
    match plan.scenario() {
        Scenario::TransmitRich => synth_transmit_rich(ch, plan, seed),
        Scenario::ReceiveRich => synth_receive_rich(ch, plan, seed),
    }
}

pub fn synth_transmit_rich(
    ch: &ChannelSet,
    plan: &BlockPlan,
    seed: u64,
) -> Result<PrecoderSet, SynthError> {
    check_shapes(ch, plan)?;
    let pol = TolerancePolicy::default();
    let b = &plan.blocks;
    let cfg = &plan.cfg;
    // Message (r,t) interferes at receiver 3-r through H_{3-r,t}.
    let kernels = [
        null_space(ch.h(2, 1), &pol),
        null_space(ch.h(1, 1), &pol),
        null_space(ch.h(2, 2), &pol),
        null_space(ch.h(1, 2), &pol),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let mut messages: [MessagePrecoders; 4] = Default::default();
        for (idx, (r, t)) in [(1, 1), (2, 1), (1, 2), (2, 2)].into_iter().enumerate() {
            let [n_v, n_w, _] = b.message(r, t);
            let v = random_in_span(&kernels[idx], n_v as usize, &mut rng)?;
            let w = v.iter().take(n_w as usize).map(j_times).collect();
            messages[idx] = MessagePrecoders {
                v,
                w,
                u: Vec::new(),
            };
        }
        // Third blocks: the first transmitter's streams are free, the
        // second's are solved onto them at the shared victim receiver.
        for (victim, lead_len, follow_len, m_lead, m_follow) in [
            (1, b.k[2], b.g[2], cfg.m1, cfg.m2),
            (2, b.l[2], b.j[2], cfg.m1, cfg.m2),
        ] {
            let r = 3 - victim;
            let lead: Vec<CVector> = (0..lead_len)
                .map(|_| random_unit(m_lead as usize, &mut rng))
                .collect();
            let mut follow = Vec::with_capacity(follow_len as usize);
            for u in lead.iter().take(follow_len as usize) {
                let target = as_column(&(ch.h(victim, 1) * u));
                let x = solve_exact(ch.h(victim, 2), &target, &pol)?;
                follow.push(unit(x.column(0).into_owned()));
            }
            while follow.len() < follow_len as usize {
                follow.push(random_unit(m_follow as usize, &mut rng));
            }
            messages[message_index(r, 1)].u = lead;
            messages[message_index(r, 2)].u = follow;
        }
        let set = PrecoderSet {
            scenario: Scenario::TransmitRich,
            messages,
            directions_r1: Vec::new(),
            directions_r2: Vec::new(),
        };
        if transmitters_full_rank(&set, cfg, &pol) {
            return Ok(set);
        }
    }
    Err(SynthError::Synthesis(MAX_REDRAWS))
}

/// Real-domain alignment triples `(h, a, b)` with `Ā·a = B̄·b = h`, drawn as
/// random combinations of the kernel of `[[I, -Ā, 0], [I, 0, -B̄]]`.
/// Returned unnormalized so the equalities hold exactly up to rounding.
pub fn alignment_triples<R: Rng + ?Sized>(
    ha: &CMatrix,
    hb: &CMatrix,
    count: usize,
    rng: &mut R,
    pol: &TolerancePolicy,
) -> Result<Vec<(RVector, RVector, RVector)>, SynthError> {
    if ha.nrows() != hb.nrows() {
        return Err(SynthError::Shape(
            "aligned channels differ in receive antennas".into(),
        ));
    }
    let basis = alignment_kernel(ha, hb, pol);
    if basis.ncols() < count {
        return Err(SynthError::PlanInfeasible {
            needed: count,
            available: basis.ncols(),
        });
    }
    let (nr, ma, mb) = (2 * ha.nrows(), 2 * ha.ncols(), 2 * hb.ncols());
    Ok((0..count)
        .map(|_| {
            let c = RVector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(rng));
            let z = &basis * c;
            (
                z.rows(0, nr).into_owned(),
                z.rows(nr, ma).into_owned(),
                z.rows(nr + ma, mb).into_owned(),
            )
        })
        .collect())
}

/// Orthonormal kernel basis of `[[I, -Ā, 0], [I, 0, -B̄]]`.
pub fn alignment_kernel(ha: &CMatrix, hb: &CMatrix, pol: &TolerancePolicy) -> RMatrix {
    let (a, b) = (realify_matrix(ha), realify_matrix(hb));
    let (nr, ma, mb) = (a.nrows(), a.ncols(), b.ncols());
    let mut stacked = RMatrix::zeros(2 * nr, nr + ma + mb);
    let eye = RMatrix::identity(nr, nr);
    stacked.view_mut((0, 0), (nr, nr)).copy_from(&eye);
    stacked.view_mut((nr, 0), (nr, nr)).copy_from(&eye);
    stacked.view_mut((0, nr), (nr, ma)).copy_from(&(-a));
    stacked.view_mut((nr, nr + ma), (nr, mb)).copy_from(&(-b));
    null_space(&stacked, pol)
}

pub fn synth_receive_rich(
    ch: &ChannelSet,
    plan: &BlockPlan,
    seed: u64,
) -> Result<PrecoderSet, SynthError> {
    check_shapes(ch, plan)?;
    let pol = TolerancePolicy::default();
    let b = &plan.blocks;
    let cfg = &plan.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let mut messages: [MessagePrecoders; 4] = Default::default();
        let mut directions = [Vec::new(), Vec::new()];
        // At receiver r the interfering messages are (3-r, 1) and (3-r, 2).
        for r in [1usize, 2] {
            let other = 3 - r;
            let pairs = b.message(other, 1)[0] as usize;
            let triples = alignment_triples(ch.h(r, 1), ch.h(r, 2), pairs, &mut rng, &pol)?;
            for (h, va, vb) in triples {
                let scale = va.norm().max(f64::MIN_POSITIVE);
                directions[r - 1].push(h.unscale(scale));
                messages[message_index(other, 1)]
                    .v
                    .push(unit(derealify_vector(&va)?));
                messages[message_index(other, 2)]
                    .v
                    .push(unit(derealify_vector(&vb)?));
            }
        }
        for (r, t, m) in [
            (1, 1, cfg.m1),
            (2, 1, cfg.m1),
            (1, 2, cfg.m2),
            (2, 2, cfg.m2),
        ] {
            let n_w = b.message(r, t)[1] as usize;
            messages[message_index(r, t)].w = (0..n_w)
                .map(|_| random_unit(m as usize, &mut rng))
                .collect();
        }
        let [d1, d2] = directions;
        let set = PrecoderSet {
            scenario: Scenario::ReceiveRich,
            messages,
            directions_r1: d1,
            directions_r2: d2,
        };
        if transmitters_full_rank(&set, cfg, &pol) {
            return Ok(set);
        }
    }
    Err(SynthError::Synthesis(MAX_REDRAWS))
}
