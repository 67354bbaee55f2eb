//! Husimi phase-space functions and the spin-variance spreading measure.

pub mod disc;
pub mod grid;
pub mod husimi;
pub mod variance;

pub use disc::{husimi_disc_projection, DiscRaster};
pub use grid::{GridSpec, HusimiGrid};
pub use husimi::{poincare_husimi, spin_husimi, time_averaged_husimi};
pub use variance::{spin_covariance, spin_variance, spin_variance_normalized};
