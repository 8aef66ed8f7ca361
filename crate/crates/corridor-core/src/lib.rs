//! Corridor-scale traffic simulation and speed-limit optimal control.
//!
//! The crate models a single freeway segment behind a variable speed limit
//! (VSL) sign: a point queue upstream, a triangular fundamental diagram,
//! bounded vehicle acceleration downstream of the sign, and a running cost
//! mixing travel time with COPERT V emission factors. On top of the forward
//! model sit a finite-horizon optimal-control solver and a receding-horizon
//! MPC loop, plus the Monte Carlo robustness machinery used by the CLI.
//!
//! All core math is generic over the scalar type through [`Real`]; concrete
//! `f64` aliases are exported at the crate root.

pub mod corridor;
pub mod demand;
pub mod emissions;
pub mod error;
pub mod experiments;
pub mod fd;
pub mod kinematics;
pub mod mpc;
pub mod ocp;

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub use error::{Error, Result};

/// Floating-point scalar used throughout the core: f32 or f64.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals and configuration.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy conversion to `f64`, used at reporting boundaries.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Default scalar for the shipped binaries and experiments.
pub type Scalar = f64;

pub type TriangularFd = fd::TriangularFd<Scalar>;
pub type AccelerationLaw = kinematics::AccelerationLaw<Scalar>;
pub type ReleaseBoundary = kinematics::ReleaseBoundary<Scalar>;
pub type EmissionModel = emissions::EmissionModel<Scalar>;
pub type CostWeights = emissions::CostWeights<Scalar>;
pub type DemandProfile = demand::DemandProfile<Scalar>;
