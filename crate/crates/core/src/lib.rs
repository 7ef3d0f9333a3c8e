//! Throughput models and deployment optimization for a UAV base station that
//! carries a directional antenna with tunable beamwidth.
//!
//! The UAV serves a large area cell by cell: it hovers over the center of each
//! hexagonal cell, the antenna main lobe covers a disk of radius `H·tanΘ`,
//! and it talks to the ground terminals inside. Three traffic models are
//! covered:
//!
//! * downlink multicast ([`Mode::Mc`]): one common file for every terminal,
//! * downlink broadcast ([`Mode::Bc`]): independent data, equal-share FDMA,
//! * uplink multiple access ([`Mode::Mac`]): independent data, equal-share FDMA.
//!
//! Module map:
//!
//! * [`model`]: parameters, unit conversion, antenna and channel gains, SNRs
//! * [`geometry`]: coverage radius, cell areas, terminal sampling
//! * [`rates`]: closed-form cell throughput for each mode
//! * [`optimizer`]: joint altitude/beamwidth optimization
//! * [`montecarlo`]: empirical validation over random terminal layouts
//! * [`mission`]: hover-point layout, tour ordering and completion time

pub mod error;
pub mod geometry;
pub mod mission;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod rates;

pub use error::{Error, Result};
pub use geometry::{CellLayout, CountModel, GtRealization, Point, Region};
pub use mission::{MissionPlan, Rect};
pub use model::{Deployment, DeploymentVars, DerivedConstants, FeasibleBox, SystemParams};
pub use montecarlo::{SimResult, SimSpec};
pub use optimizer::{Method, OptResult};
pub use rates::{McMission, Mode, RateModel, RateResult};
