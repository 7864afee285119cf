//! Date arithmetic under explicit rounding modes, and a static analyzer that
//! proves or refutes rounding-insensitivity of date comparisons in a small
//! straight-line language.

pub mod analyzer;
pub mod bidates;
pub mod date;
pub mod interp;
pub mod lang;
pub mod litmus;
pub mod numdom;
pub mod ymd;
