//! Presentations of orbifold braid groups, a bounded rewriting prover, and
//! finite monomial quotients used to check them.

pub mod center;
pub mod coset_enum;
pub mod homomorphisms;
pub mod presentations;
pub mod prover;
pub mod quotients;
pub mod suites;
pub mod words;
