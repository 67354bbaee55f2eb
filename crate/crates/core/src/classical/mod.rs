//! Semiclassical (large-`j`) dynamics: equations of motion, trajectories,
//! Poincaré sections and Lyapunov exponents.

mod dop853_tableau;
pub mod dynamics;
pub mod lyapunov;
pub mod ode;
pub mod section;

pub use dynamics::{ClassicalSystem, Trajectory};
pub use lyapunov::{lyapunov_spectrum, LyapunovResult};
pub use section::{coverage_fraction, initial_state_from_section, poincare_section, section_crossings, PoincareSection, SectionPoint};
