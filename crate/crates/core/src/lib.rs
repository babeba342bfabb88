//! Entropy vectors of multi-party quantum states and the inequalities they obey.
//!
//! * [`entvec`]: party systems, entropy vectors, linear functionals.
//! * [`ineq`]: Shannon, quantum, Ingleton, Kinser and Matúš families.
//! * [`quantum`]: dense density matrices, partial traces, von Neumann entropy.
//! * [`stab`]: exact entropies of qudit stabiliser states over Z_p.
//! * [`groups`]: poly-matroids from finite groups, distributions and subspaces.
//! * [`cone`]: exact extreme-ray enumeration for the 4-party quantum Ingleton cone.

pub mod cone;
pub mod entvec;
pub mod error;
pub mod groups;
pub mod ineq;
pub mod modp;
pub mod numfmt;
pub mod quantum;
pub mod stab;
pub mod verify;

pub use entvec::{
    Balance, EntropyVector, Evaluation, LinearFunctional, ModularPart, PartySystem, Scale,
    Subset, Verdict, NUMERIC_TOLERANCE,
};
pub use error::{Error, Result};
