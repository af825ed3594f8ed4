use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{spin_expect, Sample, SpinorState, Trajectory};
use super::linalg::HermitianEigen;
use super::{MatrixOp, NumError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact `exp(−iHΔt/ħ)` from one spectral decomposition.
    EigenExponential,
    /// `(1 + iHΔt/2ħ)⁻¹ (1 − iHΔt/2ħ)`.
    CrankNicolson,
}

/// One-step propagator for a fixed Hermitian operator and time step.
#[derive(Debug, Clone)]
pub struct Propagator {
    step: DMatrix<Complex64>,
    offset_phase: Complex64,
    op: MatrixOp,
    dt_s: f64,
}

impl Propagator {
    pub fn new(h: &MatrixOp, dt_s: f64, method: Method) -> Result<Self, NumError> {
        if !h.hermitian {
            return Err(NumError::NonHermitian);
        }
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(NumError::InvalidStep(dt_s));
        }
        let dt = h.units.time_to_scaled(dt_s);
        let n = h.dim();
        let step = match method {
            Method::EigenExponential => {
                HermitianEigen::new(&h.matrix)?.function(|l| Complex64::from_polar(1.0, -l * dt))
            }
            Method::CrankNicolson => {
                let half = Complex64::new(0.0, 0.5 * dt);
                let ident = DMatrix::<Complex64>::identity(n, n);
                let a = &ident + &h.matrix * half;
                let b = &ident - &h.matrix * half;
                a.lu().solve(&b).ok_or(NumError::Singular)?
            }
        };
        // offset is real for Hermitian operators
        let offset_phase = Complex64::from_polar(1.0, -h.offset.re * dt);
        Ok(Self { step, offset_phase, op: h.clone(), dt_s })
    }

    pub fn dt(&self) -> f64 {
        self.dt_s
    }

    fn sample(&self, t: f64, psi: &SpinorState) -> Result<Sample, NumError> {
        let spin = spin_expect(psi)?;
        let norm = psi.norm();
        let h_psi = &self.op.matrix * &psi.amps;
        let inner = psi.amps.dotc(&h_psi).re * psi.grid.spacing() / norm + self.op.offset.re;
        Ok(Sample {
            t,
            spin,
            norm,
            z_mean: psi.z_mean(),
            energy: self.op.units.energy_to_cgs(inner),
        })
    }

    /// Applies `steps` steps, sampling the initial state and every step.
    pub fn run(&self, psi0: &SpinorState, steps: usize) -> Result<Trajectory, NumError> {
        if psi0.amps.len() != self.op.dim() {
            return Err(NumError::DimensionMismatch { op: self.op.dim(), state: psi0.amps.len() });
        }
        let mut psi = psi0.clone();
        let mut samples = Vec::with_capacity(steps + 1);
        samples.push(self.sample(0.0, &psi)?);
        for k in 1..=steps {
            psi.amps = &self.step * &psi.amps * self.offset_phase;
            samples.push(self.sample(k as f64 * self.dt_s, &psi)?);
        }
        Ok(Trajectory { samples })
    }
}

/// Evolves `psi0` under `h` for `steps` steps of `dt_s` seconds.
pub fn evolve(
    h: &MatrixOp,
    psi0: &SpinorState,
    dt_s: f64,
    steps: usize,
    method: Method,
) -> Result<Trajectory, NumError> {
    Propagator::new(h, dt_s, method)?.run(psi0, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgrid::{realize, Grid1D, PhysParams, RealizationContext};
    use crate::opalg::{parse, OperatorExpr};

    fn ctx() -> RealizationContext {
        let grid = Grid1D::new(32, 1e-3).unwrap();
        RealizationContext::new(grid, PhysParams::neutron().with_accel_z(1e20), [3e-19, 0.0]).unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_static() {
        let c = ctx();
        let h = realize(&OperatorExpr::zero(), &c).unwrap();
        let psi = SpinorState::gaussian(c.grid, 0.0, 1e-4, 1.0, 0.5).unwrap();
        let traj = evolve(&h, &psi, 1e-6, 20, Method::EigenExponential).unwrap();
        let first = traj.samples[0];
        for s in &traj.samples {
            assert!((s.spin.theta - first.spin.theta).abs() < 1e-13);
            assert!((s.spin.phi.unwrap() - first.spin.phi.unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn rest_mass_gives_global_phase_only() {
        let c = ctx();
        let h = realize(&parse("beta * m * c^2").unwrap(), &c).unwrap();
        let psi = SpinorState::gaussian(c.grid, 0.0, 1e-4, 0.7, -1.2).unwrap();
        for method in [Method::EigenExponential, Method::CrankNicolson] {
            let traj = evolve(&h, &psi, 1e-6, 10, method).unwrap();
            let v0 = traj.samples[0].spin.vector();
            for s in &traj.samples {
                let v = s.spin.vector();
                for k in 0..3 {
                    assert!((v[k] - v0[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_step() {
        let c = ctx();
        let psi = SpinorState::gaussian(c.grid, 0.0, 1e-4, 0.0, 0.0).unwrap();
        let h = realize(&parse("x_z * p_z").unwrap(), &c).unwrap();
        assert!(matches!(evolve(&h, &psi, 1e-6, 1, Method::EigenExponential), Err(NumError::NonHermitian)));
        let h = realize(&OperatorExpr::sigma(0), &c).unwrap();
        assert!(matches!(evolve(&h, &psi, 0.0, 1, Method::CrankNicolson), Err(NumError::InvalidStep(_))));
    }
}
