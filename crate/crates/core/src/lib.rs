//! Lightweight analytic kinematic vehicle model for twice continuously
//! differentiable (C²) trajectories.
//!
//! The crate covers both directions of the model:
//!
//! * **analysis**: given a C² trajectory of the rear-axle center, derive
//!   speeds, accelerations, curvature, per-wheel steering angles and wheel
//!   speeds, heading and yaw rate ([`model`], [`trajectory`]);
//! * **generation**: integrate a trajectory from steering-wheel angle and
//!   longitudinal speed ([`forward`]).
//!
//! On top of that sit the calibration helpers (cubic steering function,
//! channel-comparison metrics) in [`calibration`] and the accuracy evaluation
//! battery (quality filtering, overlapping segmentation, binned maps) in
//! [`evaluation`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `c2model-tools` crate.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod error;
pub mod evaluation;
pub mod forward;
pub mod geom;
pub mod model;
pub mod spline;
pub mod trajectory;
pub mod vehicle;

pub use error::{Error, Result};
pub use geom::Vec2;
