//! Bethe Ansatz toolkit for the periodic XXZ spin-1/2 chain.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom fix the scalar to `f64`.

pub mod basis;
pub mod completeness;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fastpoint;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod model;
pub mod numeric;
pub mod roots;
pub mod solver;
pub mod wave;

pub use basis::{amplitude, ell_coeff, energy, lambda_matrix, u_coeff, LambdaConvention, PermutationTable, RootKernel};
pub use config::{config_rank, config_unrank, enumerate_configurations, Configuration};
pub use error::{Error, Result};
pub use model::ModelParams;
pub use numeric::Real;
pub use roots::{RootTuple, SpectralSet};
pub use solver::{enumerate_spectrum, ContinuationPlan};
pub use wave::WaveFunction;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Params = ModelParams<f64>;
pub type Root = RootTuple<f64>;
pub type Spectrum = SpectralSet<f64>;
pub type Wave = WaveFunction<f64>;
pub type Matrix = linalg::CMatrix<f64>;
