//! Peak standing waves of the cubic–quintic Schrödinger equation with a
//! point interaction,
//!
//! ```text
//! i u_t + u_xx + Z δ(x) u + λ₁|u|²u + λ₂|u|⁴u = 0,
//! ```
//!
//! and the machinery needed to decide their orbital stability: closed-form
//! profiles, the slope of the charge along the family, Morse indices of the
//! linearized operators, and a split-step integrator for direct simulation.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod math;
pub mod profile;
pub mod quadrature;
pub mod spectral;
pub mod stability;
pub mod vk;

pub use error::{Error, Result};
pub use profile::{ProfileEvaluator, Regime, WaveParameters};
