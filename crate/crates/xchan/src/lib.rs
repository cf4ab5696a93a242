//! Planning, precoder synthesis and numerical certification for asymmetric
//! interference alignment and cancelation on the two-user MIMO X channel.
//!
//! The usual pipeline is [`planner::plan`] → [`synth::generate_channels`] →
//! [`synth::synthesize`] → [`verify::verify_all`]; [`sim::run_trials`] wraps
//! it with structured-coded messages and noise.

pub mod cli;
pub mod planner;
pub mod rational;
pub mod realmap;
pub mod sim;
pub mod structcode;
pub mod synth;
pub mod verify;

pub use planner::{AntennaConfig, BlockPlan, Case, CaseTag, Scenario};
pub use rational::Rational;
pub use realmap::TolerancePolicy;

/// `(M1, M2, N1, N2)` paired with an exact DoF as `(numerator, denominator)`.
pub type GoldenExample = ((u32, u32, u32, u32), (i64, i64));

/// The nine worked configurations and their exact DoF.
pub const GOLDEN_EXAMPLES: [GoldenExample; 9] = [
    ((2, 2, 2, 1), (5, 2)),
    ((7, 6, 5, 4), (17, 2)),
    ((6, 3, 3, 3), (5, 1)),
    ((8, 4, 4, 3), (13, 2)),
    ((4, 4, 3, 2), (5, 1)),
    ((8, 7, 5, 5), (10, 1)),
    ((5, 4, 4, 3), (6, 1)),
    ((7, 4, 4, 4), (7, 1)),
    ((7, 6, 6, 5), (17, 2)),
];
