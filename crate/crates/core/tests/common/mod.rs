//! Independent reference computations.

pub mod oracle;
