//! Trace-count classification of images of 2-dimensional Galois
//! representations with coefficients in square-zero local algebras
//! T = F_q[X_1..X_m]/(X_iX_j).
//!
//! The building blocks are layered bottom-up:
//!
//! - [`ffield`]: arithmetic in F_{p^d};
//! - [`localalg`]: arithmetic in T;
//! - [`matgrp`]: 2x2 matrices, GL_2^D, trace-zero matrices;
//! - [`modlat`]: submodules of M_2^0(F_q)^m under conjugation;
//! - [`tracecensus`]: distinct-trace counts by formula and brute force;
//! - [`imageinfer`]: from a trace count back to the image group;
//! - [`grouplab`]: group extensions, Galois rings, splitting searches;
//! - [`heckeio`]: trace datasets and the inference pipeline;
//! - [`verify`]: self-contained verification suites.

pub mod caps;
pub mod error;
pub mod ffield;
pub mod grouplab;
pub mod heckeio;
pub mod imageinfer;
pub mod linalg;
pub mod localalg;
pub mod matgrp;
pub mod modlat;
pub mod ring;
pub mod tracecensus;
pub mod verify;

pub use caps::Caps;
pub use error::{Error, Result};
pub use ffield::{Field, FieldParams, Fq, UnitSubgroup};
pub use localalg::{AlgebraParams, LocalAlgebra, TElem};
