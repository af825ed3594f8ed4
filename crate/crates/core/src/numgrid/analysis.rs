use nalgebra::{Matrix3, Vector3};
use rustfft::{num_complex::Complex, FftPlanner};

use super::state::Trajectory;
use super::NumError;

/// Below this standard deviation a Bloch component counts as constant.
const STATIC_AMPLITUDE: f64 = 1e-9;
const MIN_CYCLES: f64 = 2.0;
const PAD_FACTOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precession {
    /// Angular frequency in rad/s of Bloch component `component`.
    Oscillating { omega: f64, component: usize, amplitude: f64 },
    Static,
}

impl Precession {
    pub fn omega(&self) -> f64 {
        match self {
            Precession::Oscillating { omega, .. } => *omega,
            Precession::Static => 0.0,
        }
    }
}

fn uniform_step(times: &[f64]) -> Result<f64, NumError> {
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(NumError::TooShort("sample times are not increasing".into()));
    }
    let tol = 1e-9 * dt * times.len() as f64;
    for (k, &t) in times.iter().enumerate() {
        if (t - times[0] - k as f64 * dt).abs() > tol {
            return Err(NumError::TooShort("samples are not uniformly spaced".into()));
        }
    }
    Ok(dt)
}

fn mean_std(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Peak of the Hann-windowed, zero-padded spectrum with parabolic
/// interpolation. Returns cycles per sample.
fn spectral_peak(y: &[f64], mean: f64) -> f64 {
    let n = y.len();
    let padded = (n * PAD_FACTOR).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            Complex::new((v - mean) * w, 0.0)
        })
        .collect();
    buf.resize(padded, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mag: Vec<f64> = buf[..padded / 2].iter().map(|z| z.norm()).collect();
    let k = (1..mag.len() - 1).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap_or(1);
    let (l, c, r) = (mag[k - 1], mag[k], mag[k + 1]);
    let denom = l - 2.0 * c + r;
    let shift = if denom.abs() > 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
    (k as f64 + shift) / padded as f64
}

/// Residual of the least-squares fit `y ≈ A cos ωt + B sin ωt + C`.
fn fit_residual(t: &[f64], y: &[f64], omega: f64) -> f64 {
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&tk, &yk) in t.iter().zip(y) {
        let row = Vector3::new((omega * tk).cos(), (omega * tk).sin(), 1.0);
        ata += row * row.transpose();
        aty += row * yk;
    }
    let Some(coef) = ata.lu().solve(&aty) else {
        return f64::INFINITY;
    };
    t.iter()
        .zip(y)
        .map(|(&tk, &yk)| {
            let fit = coef[0] * (omega * tk).cos() + coef[1] * (omega * tk).sin() + coef[2];
            (yk - fit).powi(2)
        })
        .sum()
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Dominant angular frequency of the most strongly varying Bloch
/// component. A spectral peak estimate is refined by a sinusoidal
/// least-squares fit.
pub fn precession_frequency(traj: &Trajectory) -> Result<Precession, NumError> {
    if traj.len() < 8 {
        return Err(NumError::TooShort(format!("{} samples", traj.len())));
    }
    let t = traj.times();
    let dt = uniform_step(&t)?;
    let (component, y, mean, std) = (0..3)
        .map(|k| {
            let y = traj.component(k);
            let (mean, std) = mean_std(&y);
            (k, y, mean, std)
        })
        .max_by(|a, b| a.3.total_cmp(&b.3))
        .expect("three components");
    if std < STATIC_AMPLITUDE {
        return Ok(Precession::Static);
    }
    let span = t[t.len() - 1] - t[0];
    let omega0 = 2.0 * std::f64::consts::PI * spectral_peak(&y, mean) / dt;
    let cycles = omega0 * span / (2.0 * std::f64::consts::PI);
    if cycles < MIN_CYCLES {
        return Err(NumError::TooShort(format!("{:.3} oscillation(s), need {}", cycles, MIN_CYCLES)));
    }
    let t0 = t[0];
    let shifted: Vec<f64> = t.iter().map(|v| v - t0).collect();
    let bin = 2.0 * std::f64::consts::PI / span;
    let omega = golden_min(|w| fit_residual(&shifted, &y, w), omega0 - 0.5 * bin, omega0 + 0.5 * bin);
    Ok(Precession::Oscillating { omega, component, amplitude: std * std::f64::consts::SQRT_2 })
}

/// Mean rotation rate (rad/s, right-handed) of the spin vector about `axis`,
/// from a linear fit to the unwrapped azimuth in the plane normal to it.
pub fn signed_rotation_rate(traj: &Trajectory, axis: [f64; 3]) -> Result<f64, NumError> {
    if traj.len() < 3 {
        return Err(NumError::TooShort(format!("{} samples", traj.len())));
    }
    let n = Vector3::from(axis);
    let n = n.try_normalize(0.0).ok_or_else(|| NumError::InvalidParams("zero rotation axis".into()))?;
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);

    let mut angles = Vec::with_capacity(traj.len());
    let mut prev: Option<f64> = None;
    for s in &traj.samples {
        let v = Vector3::from(s.spin.vector());
        let raw = v.dot(&e2).atan2(v.dot(&e1));
        let a = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p.rem_euclid(2.0 * std::f64::consts::PI);
                d = (d + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
                p + d
            }
        };
        angles.push(a);
        prev = Some(a);
    }
    let t = traj.times();
    let n_f = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n_f;
    let am = angles.iter().sum::<f64>() / n_f;
    let sxy: f64 = t.iter().zip(&angles).map(|(ti, ai)| (ti - tm) * (ai - am)).sum();
    let sxx: f64 = t.iter().map(|ti| (ti - tm).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgrid::state::{Sample, SpinExpectation};

    fn synthetic(omega: f64, dt: f64, n: usize, phase: f64) -> Trajectory {
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let (s, c) = (omega * t + phase).sin_cos();
                Sample {
                    t,
                    spin: SpinExpectation { sx: s, sy: 0.0, sz: c, theta: 0.0, phi: None },
                    norm: 1.0,
                    z_mean: 0.0,
                    energy: 0.0,
                }
            })
            .collect();
        Trajectory { samples }
    }

    #[test]
    fn recovers_synthetic_frequency() {
        for (omega, phase) in [(3.0, 0.0), (17.123, 0.4), (250.0, -1.1)] {
            let dt = 2.0 * std::f64::consts::PI / omega / 50.0;
            let traj = synthetic(omega, dt, 400, phase);
            let got = precession_frequency(&traj).unwrap().omega();
            assert!(((got - omega) / omega).abs() < 1e-8, "{} vs {}", got, omega);
        }
    }

    #[test]
    fn static_and_short_series() {
        let flat = synthetic(0.0, 0.1, 64, 0.3);
        assert_eq!(precession_frequency(&flat).unwrap(), Precession::Static);
        let short = synthetic(1.0, 0.01, 64, 0.0);
        assert!(matches!(precession_frequency(&short), Err(NumError::TooShort(_))));
    }

    #[test]
    fn rotation_sense() {
        // spin in the x-z plane rotating about +y: z → x is right-handed
        let traj = synthetic(2.0, 0.05, 300, 0.0);
        let rate = signed_rotation_rate(&traj, [0.0, 1.0, 0.0]).unwrap();
        assert!((rate - 2.0).abs() < 1e-9);
        let rate = signed_rotation_rate(&traj, [0.0, -1.0, 0.0]).unwrap();
        assert!((rate + 2.0).abs() < 1e-9);
    }
}
