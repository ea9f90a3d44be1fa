//! Exact construction of finite field extensions in prime characteristic as
//! explicit algebraic towers, together with the objects of their Galois-type
//! correspondences: algebras of differential operators, automorphism groups,
//! skew group algebras, centralizers and invariant subfields. All arithmetic
//! is exact; every comparison is exact equality.

pub mod correspondence;
pub mod error;
pub mod exactfield;
pub mod exactla;
pub mod expr;
pub mod operators;
pub mod symmetry;
pub mod ring;
pub mod tower;
pub mod unipoly;

pub use error::{Error, Result};
pub use ring::Field;
