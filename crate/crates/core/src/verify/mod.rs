//! Executable forms of the pointing, injectivity and return-time arguments.

mod hill;
mod injective;
mod lemmas;
mod pointing;
mod report;
mod return_time;

pub use hill::{hill_radius, return_time_bound, HillData};
pub use injective::{
    check_injective, polyline_self_intersection, refined_polyline, segment_intersection, InjectivityReport,
};
pub use lemmas::{first_event, scalar_ode_lemmas, Comparison, LEMMA_STIFFNESS};
pub use pointing::{
    check_field_pointing, check_trajectory_pointing, field_pointing, first_pointing_time, points_to, Grid, Interval,
    PointingReport,
};
pub use report::{Report, Violation};
pub use return_time::{check_return_time, random_launches, return_time, Launch};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("energy {0} is not negative: the sublevel set is unbounded")]
    Unbounded(f64),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("trace under-resolved: turning angle {angle} rad at sample {index}")]
    Resolution { angle: f64, index: usize },
}
