//! Wavefront tracking for one-dimensional strictly hyperbolic systems of
//! conservation laws on a bounded interval `[a, b]`, together with boundary
//! control synthesis on top of the tracker.
//!
//! The crate is organised bottom-up:
//!
//! * [`models`]: the system abstraction and the built-in models
//!   (`burgers`, `temple2`, `gas`, and the `psystem` contrast model).
//! * [`riemann`]: exact Riemann and boundary-Riemann solvers producing
//!   discretized wave fans.
//! * [`profile`]: piecewise-constant profiles, total variation and L1 distance.
//! * [`fronttrack`]: the event-driven front tracking engine.
//! * [`oleinik`]: one-sided decay estimates and attainable-set membership.
//! * [`steer`]: exact controllability for Temple systems.
//! * [`stabilize`]: asymptotic stabilization with absorbing boundaries.
//! * [`counterexample`]: shock persistence for the gas system.

pub mod counterexample;
pub mod error;
pub mod fronttrack;
pub mod models;
pub mod oleinik;
pub mod profile;
pub mod riemann;
pub mod stabilize;
pub mod state;
pub mod steer;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use fronttrack::{
    BoundaryMode, ControlPair, ControlSchedule, Engine, EngineOptions, EventKind, EventRecord,
    Front, FrontRecord, Side, Trajectory,
};
pub use models::{Model, System};
pub use profile::{Coordinates, Profile};
pub use riemann::{Wave, WaveFan, WaveKind};
pub use state::{State, Vector};
