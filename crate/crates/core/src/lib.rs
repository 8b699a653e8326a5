//! Curvature bound checks for finite Lorentzian pre-length spaces, compared
//! against the two-dimensional Lorentzian model spaces of constant curvature.

pub mod construct;
pub mod model;
pub mod ode;
pub mod space;
pub mod check;
pub mod harness;
pub mod cli;
