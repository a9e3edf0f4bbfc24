//! Random orbits on the extended plane and their Birkhoff sums.

mod accumulator;
mod engine;
mod lyapunov;
mod observable;
mod rng;

pub use accumulator::{AccumulatorLayout, OrbitAccumulator, RadialAxis};
pub use engine::{
    run_orbit, run_orbit_with, run_replica, run_replicas, trace_orbit, Orbit, RunConfig, RunOptions,
    DEFAULT_BURNIN, ESCAPE_TOL,
};
pub use lyapunov::{furstenberg_gamma, lyapunov_estimate, lyapunov_report, Estimate, LyapunovReport};
pub use observable::{Observable, RadialFn};
pub use rng::{sample_stream, SampleStream};
