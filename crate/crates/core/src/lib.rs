//! Cohn-Elkies sphere-packing bound functions from approximate dual windows
//! of Gaussian Gabor frames, with desk-scale verification of every claimed
//! property (sign structure, Fourier nonnegativity, Poisson residuals,
//! optimality identities).

pub mod cli;
pub mod cohn_elkies;
pub mod error;
pub mod gabor;
pub mod lattice;
pub mod linalg;
pub mod periodic;
pub mod quadrature;
pub mod report;
pub mod wexler_raz;

pub use error::{Error, Result};
