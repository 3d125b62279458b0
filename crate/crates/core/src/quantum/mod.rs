//! Exact propagation of truncated quantum states and the entanglement
//! diagnostics built on it.

mod density;
mod dynamics;
mod eigen;

pub use density::{reduced_density, von_neumann_entropy, ReducedDensity, NEGATIVE_EIGENVALUE_TOL};
pub use dynamics::{
    density_spectrum, entropy_curve, entropy_curve_plateau, evolve, DensitySpectrum, EntropyCurve, Plateau,
    DEFAULT_DENSITY_FLOOR, PRUNE_WEIGHT,
};
pub use eigen::{diagonalize, diagonalize_with, EigenSystem};

#[cfg(test)]
mod tests;
