//! Numerical realization of operator expressions on spin-1/2 ⊗ a periodic
//! one-dimensional grid along the field axis, and spin dynamics on it.
//!
//! Matrices are built in scaled units with `ħ = m = 1` and the grid length as
//! the unit of length; see [`Units`]. Transverse momenta enter as numbers and
//! transverse positions are pinned to the origin.

mod analysis;
mod cow;
mod evolve;
mod linalg;
mod probe;
mod realize;
mod state;

pub use analysis::{precession_frequency, signed_rotation_rate, Precession};
pub use cow::{cow_phase, CowGeometry, CowKind};
pub use evolve::{evolve, Method, Propagator};
pub use linalg::{hermitian_eigenvalues, HermitianEigen};
pub use probe::{symmetry_probe, ProbeEntry, ProbeOptions, ProbeReport};
pub use realize::{realize, MatrixOp};
pub use state::{spin_expect, Sample, SpinExpectation, SpinorState, Trajectory};

use thiserror::Error;

use crate::astro::Constants;
use crate::hamiltonians::HamiltonianError;
use crate::opalg::{AlgebraError, Symbol};

#[derive(Debug, Error)]
pub enum NumError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unbound symbols: {}", .0.join(", "))]
    Unbound(Vec<String>),
    #[error("operator is not Hermitian")]
    NonHermitian,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("dimension mismatch: operator {op}, state {state}")]
    DimensionMismatch { op: usize, state: usize },
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("trajectory too short: {0}")]
    TooShort(String),
    #[error("polar angle {0} is not strictly inside (0, pi)")]
    PoleAngle(f64),
    #[error("linear solve failed")]
    Singular,
    #[error("eigendecomposition failed (relative reconstruction error {0:e})")]
    Eigen(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Periodic grid of `n_points` cells on `[-length/2, length/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    length_cm: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, length_cm: f64) -> Result<Self, NumError> {
        if n_points < 32 || !n_points.is_power_of_two() {
            return Err(NumError::InvalidGrid(format!(
                "n_points must be a power of two >= 32, got {}",
                n_points
            )));
        }
        if !(length_cm.is_finite() && length_cm > 0.0) {
            return Err(NumError::InvalidGrid(format!("length must be positive, got {}", length_cm)));
        }
        Ok(Self { n_points, length_cm })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length_cm(&self) -> f64 {
        self.length_cm
    }

    pub fn spacing(&self) -> f64 {
        self.length_cm / self.n_points as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.z(j)).collect()
    }

    /// True if `z` lies in the central half of the grid.
    pub fn is_interior(&self, z: f64) -> bool {
        z.abs() <= 0.25 * self.length_cm
    }
}

/// Numeric cgs values for the scalar symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysParams {
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub accel: Option<[f64; 3]>,
    pub gravity: Option<[f64; 3]>,
    pub mu_a: Option<f64>,
    pub phi: Option<f64>,
}

impl PhysParams {
    /// Neutron mass, `c` and `ħ` from [`Constants`]; no fields bound.
    pub fn neutron() -> Self {
        Self {
            m: Constants::NEUTRON_MASS,
            c: Constants::C,
            hbar: Constants::HBAR,
            accel: None,
            gravity: None,
            mu_a: None,
            phi: None,
        }
    }

    pub fn with_accel_z(mut self, a_z: f64) -> Self {
        self.accel = Some([0.0, 0.0, a_z]);
        self
    }

    pub fn with_gravity_z(mut self, g_z: f64) -> Self {
        self.gravity = Some([0.0, 0.0, g_z]);
        self
    }

    pub fn with_mu_a(mut self, mu_a: f64) -> Self {
        self.mu_a = Some(mu_a);
        self
    }

    /// cgs value of a symbol, if bound.
    pub fn value(&self, sym: Symbol) -> Option<f64> {
        match sym {
            Symbol::Hbar => Some(self.hbar),
            Symbol::C => Some(self.c),
            Symbol::M => Some(self.m),
            Symbol::MuA => self.mu_a,
            Symbol::Phi => self.phi,
            Symbol::Ax => self.accel.map(|a| a[0]),
            Symbol::Ay => self.accel.map(|a| a[1]),
            Symbol::Az => self.accel.map(|a| a[2]),
            Symbol::Gx => self.gravity.map(|g| g[0]),
            Symbol::Gy => self.gravity.map(|g| g[1]),
            Symbol::Gz => self.gravity.map(|g| g[2]),
        }
    }

    fn validate(&self) -> Result<(), NumError> {
        let mut values = vec![self.m, self.c, self.hbar];
        values.extend(self.accel.iter().flatten());
        values.extend(self.gravity.iter().flatten());
        values.extend(self.mu_a);
        values.extend(self.phi);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NumError::InvalidParams("all values must be finite".into()));
        }
        if self.m <= 0.0 || self.c <= 0.0 || self.hbar <= 0.0 {
            return Err(NumError::InvalidParams("m, c and hbar must be positive".into()));
        }
        Ok(())
    }
}

/// Scaled unit system: mass `m`, length `L`, time `m L²/ħ`, so `ħ = m = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub mass_g: f64,
    pub length_cm: f64,
    pub time_s: f64,
}

impl Units {
    pub fn new(mass_g: f64, hbar: f64, length_cm: f64) -> Self {
        Self { mass_g, length_cm, time_s: mass_g * length_cm * length_cm / hbar }
    }

    pub fn time_to_scaled(&self, t_s: f64) -> f64 {
        t_s / self.time_s
    }

    pub fn time_to_cgs(&self, t: f64) -> f64 {
        t * self.time_s
    }

    pub fn length_to_scaled(&self, x_cm: f64) -> f64 {
        x_cm / self.length_cm
    }

    pub fn length_to_cgs(&self, x: f64) -> f64 {
        x * self.length_cm
    }

    fn momentum_unit(&self) -> f64 {
        self.mass_g * self.length_cm / self.time_s
    }

    pub fn momentum_to_scaled(&self, p: f64) -> f64 {
        p / self.momentum_unit()
    }

    pub fn momentum_to_cgs(&self, p: f64) -> f64 {
        p * self.momentum_unit()
    }

    fn energy_unit(&self) -> f64 {
        self.mass_g * self.length_cm * self.length_cm / (self.time_s * self.time_s)
    }

    pub fn energy_to_scaled(&self, e: f64) -> f64 {
        e / self.energy_unit()
    }

    pub fn energy_to_cgs(&self, e: f64) -> f64 {
        e * self.energy_unit()
    }

    pub fn acceleration_to_scaled(&self, a: f64) -> f64 {
        a * self.time_s * self.time_s / self.length_cm
    }

    pub fn velocity_to_scaled(&self, v: f64) -> f64 {
        v * self.time_s / self.length_cm
    }

    /// Angular frequency in rad/s from a scaled one.
    pub fn rate_to_cgs(&self, w: f64) -> f64 {
        w / self.time_s
    }

    /// Scaled value of a symbol given its cgs value.
    pub fn scale_symbol(&self, sym: Symbol, cgs: f64) -> f64 {
        match sym {
            Symbol::Hbar => cgs / (self.energy_unit() * self.time_s),
            Symbol::M => cgs / self.mass_g,
            Symbol::C => self.velocity_to_scaled(cgs),
            Symbol::Ax | Symbol::Ay | Symbol::Az | Symbol::Gx | Symbol::Gy | Symbol::Gz => {
                self.acceleration_to_scaled(cgs)
            }
            Symbol::MuA | Symbol::Phi => cgs,
        }
    }
}

/// Everything needed to turn an expression into a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationContext {
    pub grid: Grid1D,
    pub params: PhysParams,
    /// Transverse momenta `(p_x, p_y)` in g·cm/s.
    pub p_perp: [f64; 2],
    pub units: Units,
}

impl RealizationContext {
    pub fn new(grid: Grid1D, params: PhysParams, p_perp: [f64; 2]) -> Result<Self, NumError> {
        params.validate()?;
        if p_perp.iter().any(|p| !p.is_finite()) {
            return Err(NumError::InvalidParams("transverse momenta must be finite".into()));
        }
        let units = Units::new(params.m, params.hbar, grid.length_cm());
        Ok(Self { grid, params, p_perp, units })
    }

    pub fn with_p_perp(&self, p_perp: [f64; 2]) -> Self {
        Self { p_perp, ..self.clone() }
    }

    pub fn with_params(&self, params: PhysParams) -> Result<Self, NumError> {
        Self::new(self.grid, params, self.p_perp)
    }

    pub fn scaled_symbol(&self, sym: Symbol) -> Option<f64> {
        self.params.value(sym).map(|v| self.units.scale_symbol(sym, v))
    }
}

/// Precession rate `|1+μ_a| |a_z| |p_⊥| / (2mc²)` of the accelerational spin
/// term for a field along `ẑ`, in rad/s.
pub fn spin_precession_rate(params: &PhysParams, mu_a: f64, p_perp: [f64; 2]) -> Option<f64> {
    let a_z = params.accel?[2];
    let p = p_perp[0].hypot(p_perp[1]);
    Some((1.0 + mu_a).abs() * a_z.abs() * p / (2.0 * params.m * params.c * params.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(16, 1.0).is_err());
        assert!(Grid1D::new(48, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0).is_err());
        let g = Grid1D::new(64, 2.0).unwrap();
        assert_eq!(g.z(32), 0.0);
        assert_relative_eq!(g.z(0), -1.0);
        assert!(g.is_interior(0.5));
        assert!(!g.is_interior(0.6));
    }

    #[test]
    fn unit_round_trips() {
        let u = Units::new(Constants::NEUTRON_MASS, Constants::HBAR, 1e-3);
        for v in [1e-7, 3.0, 2.5e12] {
            assert_relative_eq!(u.time_to_cgs(u.time_to_scaled(v)), v, max_relative = 1e-15);
            assert_relative_eq!(u.length_to_cgs(u.length_to_scaled(v)), v, max_relative = 1e-15);
            assert_relative_eq!(u.momentum_to_cgs(u.momentum_to_scaled(v)), v, max_relative = 1e-15);
            assert_relative_eq!(u.energy_to_cgs(u.energy_to_scaled(v)), v, max_relative = 1e-15);
        }
        assert_relative_eq!(u.scale_symbol(Symbol::Hbar, Constants::HBAR), 1.0, max_relative = 1e-14);
        assert_relative_eq!(u.scale_symbol(Symbol::M, Constants::NEUTRON_MASS), 1.0, max_relative = 1e-14);
        // momentum unit is ħ/L
        assert_relative_eq!(u.momentum_to_cgs(1.0), Constants::HBAR / 1e-3, max_relative = 1e-14);
    }

    #[test]
    fn params_validation() {
        let g = Grid1D::new(32, 1.0).unwrap();
        let mut p = PhysParams::neutron();
        p.m = -1.0;
        assert!(RealizationContext::new(g, p, [0.0, 0.0]).is_err());
        let p = PhysParams::neutron().with_accel_z(f64::NAN);
        assert!(RealizationContext::new(g, p, [0.0, 0.0]).is_err());
    }
}
