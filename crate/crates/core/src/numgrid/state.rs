use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{Grid1D, NumError};

const NORM_TOL: f64 = 1e-12;
const DEGENERATE: f64 = 1e-9;

/// Two-component wavefunction on the grid, normalized so that
/// `Σ_j (|ψ↑(z_j)|² + |ψ↓(z_j)|²) Δz = 1`.
#[derive(Debug, Clone)]
pub struct SpinorState {
    pub grid: Grid1D,
    pub amps: DVector<Complex64>,
}

impl SpinorState {
    /// Normalizes `amps` (length `2N`, spin-up block first).
    pub fn from_amplitudes(grid: Grid1D, amps: DVector<Complex64>) -> Result<Self, NumError> {
        if amps.len() != 2 * grid.n_points() {
            return Err(NumError::DimensionMismatch { op: 2 * grid.n_points(), state: amps.len() });
        }
        let mut s = Self { grid, amps };
        let norm = s.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(NumError::ZeroNorm);
        }
        s.amps /= Complex64::new(norm.sqrt(), 0.0);
        debug_assert!((s.norm() - 1.0).abs() <= NORM_TOL);
        Ok(s)
    }

    /// Spin direction `(θ, φ)` times a Gaussian envelope.
    pub fn gaussian(grid: Grid1D, center_cm: f64, width_cm: f64, theta: f64, phi: f64) -> Result<Self, NumError> {
        let n = grid.n_points();
        let up = Complex64::new((theta / 2.0).cos(), 0.0);
        let down = Complex64::from_polar((theta / 2.0).sin(), phi);
        let env: Vec<f64> = (0..n)
            .map(|j| {
                let d = (grid.z(j) - center_cm) / width_cm;
                (-0.5 * d * d).exp()
            })
            .collect();
        let amps = DVector::from_fn(2 * n, |k, _| {
            let e = Complex64::new(env[k % n], 0.0);
            if k < n {
                up * e
            } else {
                down * e
            }
        });
        Self::from_amplitudes(grid, amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn z_mean(&self) -> f64 {
        let n = self.grid.n_points();
        let weighted: f64 = (0..n)
            .map(|j| self.grid.z(j) * (self.amps[j].norm_sqr() + self.amps[j + n].norm_sqr()))
            .sum();
        weighted * self.grid.spacing() / self.norm()
    }
}

/// Spin expectation values and Bloch angles. `phi` is `None` where it is
/// indeterminate: at the poles or when `⟨σ⟩` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectation {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub theta: f64,
    pub phi: Option<f64>,
}

impl SpinExpectation {
    pub fn vector(&self) -> [f64; 3] {
        [self.sx, self.sy, self.sz]
    }

    pub fn magnitude(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }
}

pub fn spin_expect(psi: &SpinorState) -> Result<SpinExpectation, NumError> {
    let norm = psi.norm();
    if !(norm > 0.0) {
        return Err(NumError::ZeroNorm);
    }
    let n = psi.grid.n_points();
    let dz = psi.grid.spacing();
    let mut cross = Complex64::new(0.0, 0.0);
    let mut diff = 0.0;
    for j in 0..n {
        let (u, d) = (psi.amps[j], psi.amps[j + n]);
        cross += u.conj() * d;
        diff += u.norm_sqr() - d.norm_sqr();
    }
    let scale = dz / norm;
    let sx = 2.0 * cross.re * scale;
    let sy = 2.0 * cross.im * scale;
    let sz = diff * scale;
    let mag = (sx * sx + sy * sy + sz * sz).sqrt();
    if mag < DEGENERATE {
        return Ok(SpinExpectation { sx, sy, sz, theta: 0.0, phi: None });
    }
    let theta = (sz / mag).clamp(-1.0, 1.0).acos();
    let phi = (theta.sin() >= DEGENERATE).then(|| sy.atan2(sx));
    Ok(SpinExpectation { sx, sy, sz, theta, phi })
}

/// One trajectory sample. `energy` is `⟨H⟩` in erg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub spin: SpinExpectation,
    pub norm: f64,
    pub z_mean: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

pub const CSV_HEADER: &str = "t,sx,sy,sz,theta,phi,norm,z_mean";

fn fmt17(v: f64) -> String {
    format!("{:.16e}", v)
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.spin.vector()[k]).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        let first = self.samples.first().map(|s| s.norm).unwrap_or(1.0);
        self.samples.iter().map(|s| (s.norm - first).abs()).fold(0.0, f64::max)
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        let first = match self.samples.first() {
            Some(s) => s.energy,
            None => return 0.0,
        };
        let scale = first.abs().max(f64::MIN_POSITIVE);
        self.samples.iter().map(|s| (s.energy - first).abs() / scale).fold(0.0, f64::max)
    }

    /// Largest Bloch-vector distance between matching samples.
    pub fn max_bloch_deviation(&self, other: &Trajectory) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| {
                let (va, vb) = (a.spin.vector(), b.spin.vector());
                ((va[0] - vb[0]).powi(2) + (va[1] - vb[1]).powi(2) + (va[2] - vb[2]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// CSV with header `t,sx,sy,sz,theta,phi,norm,z_mean`, 17 significant
    /// digits, `nan` for an indeterminate `phi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", CSV_HEADER)?;
        for s in &self.samples {
            let phi = s.spin.phi.map(fmt17).unwrap_or_else(|| "nan".into());
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                fmt17(s.t),
                fmt17(s.spin.sx),
                fmt17(s.spin.sy),
                fmt17(s.spin.sz),
                fmt17(s.spin.theta),
                phi,
                fmt17(s.norm),
                fmt17(s.z_mean)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn grid() -> Grid1D {
        Grid1D::new(64, 1.0).unwrap()
    }

    #[test]
    fn spin_up_is_at_the_pole() {
        let s = SpinorState::gaussian(grid(), 0.0, 0.05, 0.0, 0.0).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let e = spin_expect(&s).unwrap();
        assert!(e.theta.abs() < 1e-12);
        assert!(e.phi.is_none());
    }

    #[test]
    fn equal_superposition_on_equator() {
        let s = SpinorState::gaussian(grid(), 0.0, 0.05, FRAC_PI_2, 0.0).unwrap();
        let e = spin_expect(&s).unwrap();
        assert!((e.theta - FRAC_PI_2).abs() < 1e-12);
        assert!(e.phi.unwrap().abs() < 1e-12);
        assert!((e.sx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_spin_vector_is_flagged() {
        // |↑⟩ on the left packet, |↓⟩ on the right one: ⟨σ⟩ = 0
        let g = grid();
        let n = g.n_points();
        let amps = DVector::from_fn(2 * n, |k, _| {
            let z = g.z(k % n);
            let c = if k < n { -0.2 } else { 0.2 };
            Complex64::new((-((z - c) / 0.03f64).powi(2)).exp(), 0.0)
        });
        let s = SpinorState::from_amplitudes(g, amps).unwrap();
        let e = spin_expect(&s).unwrap();
        assert!(e.magnitude() < 1e-9);
        assert!(e.phi.is_none());
    }

    #[test]
    fn zero_state_rejected() {
        let g = grid();
        let amps = DVector::from_element(2 * g.n_points(), Complex64::new(0.0, 0.0));
        assert!(matches!(SpinorState::from_amplitudes(g, amps), Err(NumError::ZeroNorm)));
    }

    #[test]
    fn csv_header_and_precision() {
        let s = SpinorState::gaussian(grid(), 0.0, 0.05, 0.0, 0.0).unwrap();
        let spin = spin_expect(&s).unwrap();
        let traj = Trajectory {
            samples: vec![Sample { t: 0.1, spin, norm: 1.0, z_mean: 0.0, energy: 0.0 }],
        };
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 8);
        assert_eq!(row[0], "1.0000000000000001e-1");
        assert_eq!(row[5], "nan");
    }
}
