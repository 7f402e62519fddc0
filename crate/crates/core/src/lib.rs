//! Numerical study of globally defined solutions of `f'' = f^2 - phi(x)`.
pub mod bifurcation;
pub mod checks;
pub mod cli;
pub mod integrate;
pub mod problem;
pub mod quad;
pub mod series;
pub mod spectrum;
pub mod zset;
