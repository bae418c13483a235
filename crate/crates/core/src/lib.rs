//! Generalized momentum flow: the ODE `ẋ = -m∇f(x) - n v`, `v̇ = ∇f(x) - q v`,
//! its Euler and RK4 discretizations, the maps connecting those
//! discretizations to heavy ball, Nesterov and QHM, discrete Lyapunov
//! certificates and truncation/stability analysis.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod integrators;
pub mod lyapunov;
pub mod mappings;
pub mod model;
pub mod objectives;

pub use error::{Error, Result};
