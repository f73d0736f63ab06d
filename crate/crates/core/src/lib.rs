//! Exact computation of classical, c- and ℘-differential spectra over finite
//! fields, together with the combinatorial objects attached to perfect
//! ℘-nonlinear functions: orthomorphisms, quasigroup difference sets and the
//! paired-block incidence structures of their graphs.
//!
//! The crate is `no_std` and only needs `alloc`. All loops are sequential;
//! the accumulator types in [`diffspec`] and [`quasigroup`] can be merged, so
//! a caller with threads can split the work and reduce deterministically.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
pub mod catalog;
pub mod design;
pub mod diffspec;
pub mod equiv;
mod error;
pub mod func;
pub mod gf;
pub mod linalg;
pub mod ortho;
pub mod quasigroup;

pub use error::{Error, Result};
pub use func::{Provenance, VFunc};
pub use gf::{Elt, Embedding, FieldCtx, FieldSpec};
pub use ortho::{Family, Ortho};
