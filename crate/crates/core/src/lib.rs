#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod moebius;
pub mod quadrature;
pub mod su11;
