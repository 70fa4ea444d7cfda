//! Compatibility support mappings, witness mappings and observables on
//! effect algebras, with exhaustive exact-arithmetic verification.

pub mod boolean;
pub mod csm;
pub mod effect;
pub mod io;
pub mod observable;
pub mod rational;
pub mod search;
pub mod subset;
pub mod witness;

pub use rational::Rational;
pub use subset::Subset;
