//! Simulation of interaction-free detection of an opaque object inside a
//! monolithic total-internal-reflection ring resonator (MOTIRR).
//!
//! The crate models the frustrated-total-internal-reflection coupler, the
//! steady-state and round-trip response of the ring cavity for cw and pulsed
//! Gaussian sources, single-photon outcome statistics, and the transient
//! build-up of resonance under boundary-condition switching.
//!
//! Core math is generic over the scalar type through [`Scalar`] (any
//! `num_traits::Float`); the Monte Carlo layers in [`photon`] and
//! [`transient`] are `f64`-concrete because they draw from an RNG.
//!
//! All frequencies are handled as dimensionless detuning `u = (omega -
//! omega_res) * T` where `T` is the round-trip time; physical units only
//! appear in the FTIR coupler geometry (meters, radians).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use thiserror::Error;

pub mod ftir;
pub mod photon;
pub mod ring;
pub mod spectral;
pub mod transient;

/// Scalar type the core math is generic over.
pub trait Scalar: Float + FloatConst + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FloatConst + Debug + Display + Send + Sync + 'static {}

/// Complex amplitude over a generic scalar.
pub type Cplx<T> = Complex<T>;

pub type C32 = Complex<f32>;
pub type C64 = Complex<f64>;
pub type Grid32 = spectral::FrequencyGrid<f32>;
pub type Grid64 = spectral::FrequencyGrid<f64>;
pub type Source64 = spectral::SourceSpec<f64>;
pub type Coupler64 = ftir::CouplerParams<f64>;
pub type Reflection64 = ftir::ComplexReflection<f64>;
pub type Ring64 = ring::RingParams<f64>;
pub type Cavity64 = transient::CavityState<f64>;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no evanescent field: n1*sin(theta1) does not exceed the gap index")]
    NoEvanescentField,
    #[error("angle below the critical angle: no total internal reflection")]
    SubcriticalAngle,
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Cast an `f64` literal into the generic scalar.
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from(v).expect("literal representable in scalar type")
}
