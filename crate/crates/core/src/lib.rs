//! Finite desk-scale combinatorics behind Cohen-generic Boolean algebras.
//!
//! * [`morass`] builds finite prefixes of neat simplified (ω,1)-morasses and
//!   checks their axioms.
//! * [`lmodel`] runs the stage-by-stage construction of the generating
//!   structures `I_α`, driven by a bit stream.
//! * [`balg`] realises the presented Boolean algebra through its Stone space
//!   and computes exact sup-norms of simple functions.
//! * [`cohen`] is the single Cohen poset together with the density and
//!   pigeonhole arguments.
//! * [`plam`] is the poset of finitely presented algebras over an index set.

pub mod balg;
pub mod cohen;
pub mod lmodel;
pub mod morass;
pub mod plam;
pub mod report;
pub mod text;

pub use num_rational::BigRational as Rational;
