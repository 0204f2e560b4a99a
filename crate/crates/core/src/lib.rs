//! Estimation of the stress-strength reliability `R = P(Y < X)` when strength
//! `X` and stress `Y` follow generalized linear failure rate (GLFR) laws.
//!
//! The crate covers the GLFR distribution itself ([`glfr`]), shared numerics
//! ([`numerics`]), estimation with known common scale ([`known`]), with unknown
//! common scale ([`common`]), the fully general six-parameter case
//! ([`general`]), progressive type-II censoring ([`censored`]) and a Monte
//! Carlo harness ([`sim`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod censored;
pub mod common;
pub mod datasets;
mod error;
pub mod general;
pub mod glfr;
pub mod known;
pub mod numerics;
pub mod sim;
pub mod stream;

pub use error::{Error, Result};
pub use glfr::GlfrParams;
pub use known::{GammaPrior, RPosterior};
pub use numerics::{Interval, RootConfig};
