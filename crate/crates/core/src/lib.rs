//! Numerical toolkit for orthogonal polynomials on the unit circle.
//!
//! The crate covers measures on the circle and their moments, the Szegő
//! recursion and Verblunsky coefficients, the Carathéodory, Schur and Szegő
//! functions, the relative Szegő function with its step-by-step sum rules,
//! and transfer-matrix quantities (Weyl solutions, `m⁺`, Lyapunov exponents,
//! two-sided Green's function).

pub mod analytic;
pub mod error;
pub mod fourier;
pub mod lyapunov;
pub mod measure;
pub mod relative;
pub mod szego;
pub mod transfer;

pub use error::{OpucError, Result};
pub use measure::{Atom, CircleMeasure, MeasureSpec, MomentSeq, Weight};
pub use num_complex::Complex64;
pub use szego::{PolyPair, VerblunskySeq};
