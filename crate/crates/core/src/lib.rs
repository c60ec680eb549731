//! Proof-theoretic semantics workbench for intuitionistic propositional logic.
//!
//! Natural deduction with atomic bases, detour reduction, a contraction-free
//! decision procedure with witness and countermodel extraction, and the
//! support / satisfaction judgments of base-extension semantics.

pub mod bases;
pub mod generate;
pub mod proofs;
pub mod prover;
pub mod reduction;
pub mod semantics;
pub mod syntax;

pub use bases::{AtomicRule, Base, Level, Premise};
pub use proofs::{Argument, CalculusMode, Label, Rule};
pub use syntax::{Atom, Formula, Sequent};
