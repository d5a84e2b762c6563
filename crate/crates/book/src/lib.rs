//! The guide's code snippets, compiled and run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/decoherence-factor.md")]
pub mod decoherence_factor {}

#[doc = include_str!("../../../book/src/exact-diagonalization.md")]
pub mod exact_diagonalization {}

#[doc = include_str!("../../../book/src/free-fermions.md")]
pub mod free_fermions {}

#[doc = include_str!("../../../book/src/mode-average.md")]
pub mod mode_average {}

#[doc = include_str!("../../../book/src/switching.md")]
pub mod switching {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
