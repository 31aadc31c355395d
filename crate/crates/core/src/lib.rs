//! LEO orbit modelling with solar radiation pressure.
//!
//! The crate covers two-body orbit description and RK4 propagation, TLE
//! ingestion, Earth-fixed geometry and ground-station passes, cannonball SRP
//! acceleration with its inclination effect, and a gradient-descent linear
//! regressor trained on SRP sweep data.

pub mod timeframe;
pub mod kepler;
pub mod tle;
pub mod ephemeris;
pub mod propagator;
pub mod geotrack;
pub mod srp;
pub mod mlreg;
pub mod plot;
pub mod cli;

pub use kepler::{KeplerianElements, StateVector, Vec3};
pub use timeframe::Epoch;
