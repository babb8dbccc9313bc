//! Regularized three-body problem on the circle with the cotangent
//! potential, and construction of the symmetric Schubart orbit by shooting
//! over a Wazewski set.
//!
//! Bodies 1 and 2 have equal mass `n`, body 3 has mass `m`, and
//! `m + 2n = 1`. The dynamics is written in McGehee variables with the
//! binary collisions regularized, so the orbit passes through them as
//! ordinary crossings of `u = pi/2 (mod pi)`.

pub mod claims;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod homothetic;
pub mod model;
pub mod ode;
pub mod potential;
pub mod roots;
pub mod shooting;
pub mod wazewski;

pub use coords::{AngularConfig, JacobiState, PolarState, RegionLabel, RegularizedState};
pub use error::{Error, Result};
pub use model::{EnergyLevel, MassContext};
