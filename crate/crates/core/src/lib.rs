//! Generalized singular value functions, symmetric function spaces, traces and
//! determinants on finite matrix models and closed-form spectral profiles,
//! together with a seeded verification harness for the inequalities that
//! relate them.

pub mod matmodel;
mod quad;
pub mod stepfn;
pub mod spaces;
pub mod traces;
pub mod dets;
pub mod verify;
