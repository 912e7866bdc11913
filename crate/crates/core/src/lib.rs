//! Classification machinery for symmetric entanglers on finite spin rings.
//!
//! The crate is `no_std` with `alloc`. Everything is a pure function over
//! immutable values; randomness always comes from a caller supplied seed.
//!
//! Layout follows the data flow:
//!
//! * [`group`], [`smith`], [`cohomology`]: finite groups, cochains valued in
//!   roots of unity, and exact cohomology over `Z/m`.
//! * [`projrep`]: projective representations and intertwiners.
//! * [`lattice`]: wires, local operators, on-site symmetries, layered circuits.
//! * [`boundary`]: boundary algebras, implementing unitaries and indices.
//! * [`constructions`]: the shift example, blending, even/odd factorization,
//!   0d disentangling and swindle charge schedules.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod boundary;
pub mod cohomology;
pub mod config;
pub mod constructions;
pub mod error;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod projrep;
pub mod rng;
pub mod smith;
pub mod tensor;

pub use config::{Config, Tolerances};
pub use error::{Error, Result};
pub use linalg::{c64, CMat};
