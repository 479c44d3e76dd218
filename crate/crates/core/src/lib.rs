//! Approximation algorithm for scheduling monotone moldable jobs on
//! contiguous machines, with exact rational arithmetic throughout.
//!
//! [`driver::solve`] searches over makespan guesses; each guess runs a
//! three-class knapsack ([`mckp`]), a three-shelf construction and repair
//! ([`shelf`]), and an independent check ([`verify`]).

pub mod driver;
pub mod error;
pub mod gen;
pub mod mckp;
pub mod model;
pub mod rat;
pub mod shelf;
pub mod verify;

pub use driver::{solve, try_guess, GuessOutcome, SolveResult};
pub use error::{ContractViolation, InvariantViolation, SolveError};
pub use model::{validate_instance, Instance, Job};
pub use rat::{rat, Rat};
pub use shelf::{PlacedJob, Schedule};
pub use verify::{validate_schedule, VerificationReport};
