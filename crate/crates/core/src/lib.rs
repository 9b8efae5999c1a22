#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod error;
pub mod generate;
pub mod run;
pub mod energy;
pub mod solver;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
