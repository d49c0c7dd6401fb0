// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line front end and file formats for `peakwave-core`, plus the
//! FFT-based delta propagator used as an oracle for the time stepper.

pub mod cli;
pub mod propagator;
pub mod report;
