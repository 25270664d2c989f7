//! Polymorphism-homogeneity of finite relational structures.
//!
//! A structure `A` is *k-polymorphism-homogeneous* when every partial
//! polymorphism `A^k ⇀ A` with finite domain extends to a total one, and
//! *polymorphism-homogeneous* when this holds for every `k`. This crate
//! decides the property with re-checkable certificates, computes the finite
//! Pol/Inv Galois connection, and classifies graphs, posets, strict posets and
//! lattices of equivalence relations.

pub mod classify;
pub mod engine;
pub mod error;
pub mod galois;
pub mod gen;
pub mod homogeneity;
pub mod model;

pub use error::{Error, Result};
