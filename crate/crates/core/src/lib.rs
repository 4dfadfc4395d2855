#![allow(clippy::needless_range_loop)]

pub mod linalg;
pub mod poly;
pub mod seeds;
pub mod coxeter;
pub mod double_bruhat;
pub mod graphs;
pub mod bounds;
pub mod tropical;
