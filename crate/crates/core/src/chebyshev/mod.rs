//! Chebyshev expansions: time propagation, kernel polynomial spectra,
//! peak extraction and the time-average coefficient matrix.

pub mod bessel;
pub mod kpm;
pub mod peaks;
pub mod propagate;
pub mod timeavg;

pub use kpm::{kpm_green_function, Kernel, Spectrum};
pub use peaks::{peak_extract, Peak};
pub use propagate::ChebyshevPropagator;
pub use timeavg::{time_avg_coefficients, TimeAvgMatrix};
