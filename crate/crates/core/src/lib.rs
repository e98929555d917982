//! Exact saecular decomposition of finite chain diagrams.
//!
//! Diagrams of finitely generated abelian groups, vector spaces over `Q` or
//! `F_p`, and small finite groups are split into interval factors with explicit
//! generators. The same machinery yields torsion-aware persistent homology of
//! filtered chain complexes, type-B persistence diagrams and Leray–Serre tables.

pub mod abgrp;
pub mod coeff;
pub mod diagram;
pub mod error;
pub mod fingroup;
pub mod homology;
pub mod intlinalg;
pub mod json;
pub mod par;
pub mod random;
pub mod saecular;

pub use error::{Error, Result};
