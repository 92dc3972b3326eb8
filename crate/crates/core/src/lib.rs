//! Achievable rate regions, outer bounds and optimal phase schedules for
//! half-duplex bi-directional relaying.
//!
//! Two terminals `a` and `b` exchange messages through a decode-and-forward
//! relay `r`. Four protocols are modelled:
//!
//! * [`Protocol::Dt`]: direct transmission, no relay, two phases.
//! * [`Protocol::Mabc`]: both terminals transmit to the relay, then the relay
//!   broadcasts the network-coded message.
//! * [`Protocol::Tdbc`]: terminals transmit in turn (each overhearing the
//!   other), then the relay broadcasts.
//! * [`Protocol::Hbc`]: a four phase hybrid of the two above.
//!
//! Every region is described by linear inequalities in the phase durations
//! and the rates, so a fixed schedule gives a convex polygon
//! ([`fixed_delta_region`]) and the optimized region over all schedules is
//! recovered by a small linear program ([`optimize_schedule`],
//! [`optimized_region`]).
//!
//! ```
//! use birelay::{gaussian_mi_table, optimize_schedule, BoundKind, ChannelGains, Protocol};
//!
//! let gains = ChannelGains::from_db(10.0, -7.0, 0.0, 5.0).unwrap();
//! let table = gaussian_mi_table(&gains, Protocol::Hbc);
//! let best = optimize_schedule(Protocol::Hbc, BoundKind::Inner, &table, 0.5).unwrap();
//! assert!(best.sum_rate() > 3.0);
//! ```

pub mod channel;
pub mod discrete;
mod error;
pub mod fading;
pub mod lp;
pub mod protocol;
pub mod region;

pub use channel::{capacity_c, db_to_linear, gaussian_mi_table, linear_to_db, ChannelGains, Link, MiTable};
pub use discrete::{
    discrete_mi_table, mabc_capacity_region, mabc_fixed_inputs_region, mutual_information, mutual_information_cond,
    DiscreteChannel, InputDistributions, InputGrid, StochasticMatrix,
};
pub use error::{Error, Result};
pub use fading::{
    montecarlo_expected_rates, montecarlo_samples, sample_gains, sweep_sum_rate, FadingConfig, FadingModel, McReport,
    PartialGainsDb, SweepParam, SweepSpec, SweepTable,
};
pub use lp::{
    optimize_schedule, optimized_region, simplex_solve, LinearProgram, LpSolution, LpStatus, ScheduleOptimum,
};
pub use protocol::{
    build_constraints, fixed_delta_region, BoundKind, Constraint, ConstraintSet, PhaseSchedule, Protocol,
};
pub use region::{HalfPlane, RatePair, RateRegion, FEASIBILITY_TOL};
