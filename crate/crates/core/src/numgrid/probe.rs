use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::Serialize;

use super::{evolve, realize, spin_precession_rate, Method, NumError, RealizationContext, SpinorState};
use crate::hamiltonians::{term, Kind, MuA, Term};

/// Finite-difference step as a fraction of the precession period.
const STEP_FRACTION: f64 = 1e-4;
/// Absolute floor of the rate comparisons, relative to the precession rate.
const RATE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    /// Ensemble size: transverse-momentum directions drawn uniformly in azimuth.
    pub members: usize,
    pub seed: u64,
    /// Initial azimuth of the spin.
    pub phi0: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { members: 32, seed: 0, phi0: 0.0 }
    }
}

/// Initial rates of one ensemble member, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberRates {
    pub alpha: f64,
    pub dtheta_dt_plus: f64,
    pub dtheta_dt_minus: f64,
    pub dtheta_dt_mirror: f64,
    pub dphi_dt: f64,
}

/// Ensemble-averaged rates at one initial polar angle. Per-member values are
/// kept in `members` for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub theta0: f64,
    pub dtheta_dt_plus: f64,
    pub dtheta_dt_minus: f64,
    pub dtheta_dt_mirror: f64,
    pub phi_drift_mean: f64,
    pub phi_drift_std: f64,
    pub members: Vec<MemberRates>,
    /// Single-member precession rate `|1+μ_a| |a| |p_⊥| / 2mc²`.
    pub rate_scale: f64,
}

impl ProbeEntry {
    fn close(&self, a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + RATE_FLOOR * self.rate_scale
    }

    /// `θ̇(θ₀) = θ̇(π − θ₀)` for the ensemble averages.
    pub fn mirror_holds(&self, rel: f64) -> bool {
        self.close(self.dtheta_dt_plus, self.dtheta_dt_mirror, rel)
    }

    /// Reversing the field reverses the ensemble-averaged `θ̇`.
    pub fn reversal_holds(&self, rel: f64) -> bool {
        self.close(self.dtheta_dt_plus, -self.dtheta_dt_minus, rel)
    }
}

impl Serialize for ProbeEntry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProbeEntry", 5)?;
        st.serialize_field("dtheta_dt_plus", &self.dtheta_dt_plus)?;
        st.serialize_field("dtheta_dt_minus", &self.dtheta_dt_minus)?;
        st.serialize_field("dtheta_dt_mirror", &self.dtheta_dt_mirror)?;
        st.serialize_field("phi_drift_mean", &self.phi_drift_mean)?;
        st.serialize_field("phi_drift_std", &self.phi_drift_std)?;
        st.end()
    }
}

/// Serializes as an object keyed by `θ₀` in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
}

impl Serialize for ProbeReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for e in &self.entries {
            map.serialize_entry(&e.theta0.to_string(), e)?;
        }
        map.end()
    }
}

fn sample_azimuths(opts: &ProbeOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.members).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
}

/// Second-order one-sided derivative from three equally spaced samples.
fn forward_derivative(v: [f64; 3], dt: f64) -> f64 {
    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
}

fn unwrap_near(reference: f64, v: f64) -> f64 {
    reference + (v - reference + PI).rem_euclid(2.0 * PI) - PI
}

struct MemberSetup<'a> {
    ctx: &'a RealizationContext,
    mu_a: &'a BigRational,
    a_z: f64,
    p_abs: f64,
    dt: f64,
    width_cm: f64,
    phi0: f64,
}

impl MemberSetup<'_> {
    /// `(θ̇, φ̇)` at `θ₀` under field `sign · a_z` for transverse direction `alpha`.
    fn rates(&self, alpha: f64, sign: f64, theta0: f64) -> Result<(f64, f64), NumError> {
        let mut params = self.ctx.params.clone();
        params.accel = Some([0.0, 0.0, sign * self.a_z]);
        let ctx = self
            .ctx
            .with_params(params)?
            .with_p_perp([self.p_abs * alpha.cos(), self.p_abs * alpha.sin()]);
        let spin = term(Kind::Accelerational, Term::Spin, Some(&MuA::Value(self.mu_a.clone())));
        let h = realize(&spin, &ctx)?;
        let psi = SpinorState::gaussian(ctx.grid, 0.0, self.width_cm, theta0, self.phi0)?;
        let traj = evolve(&h, &psi, self.dt, 2, Method::EigenExponential)?;
        let thetas = [0, 1, 2].map(|k| traj.samples[k].spin.theta);
        let phis = [0, 1, 2].map(|k| traj.samples[k].spin.phi.unwrap_or(self.phi0));
        let phis = [phis[0], unwrap_near(phis[0], phis[1]), unwrap_near(phis[0], phis[2])];
        Ok((forward_derivative(thetas, self.dt), forward_derivative(phis, self.dt)))
    }

    fn member(&self, alpha: f64, theta0: f64) -> Result<MemberRates, NumError> {
        let (plus, dphi) = self.rates(alpha, 1.0, theta0)?;
        let (minus, _) = self.rates(alpha, -1.0, theta0)?;
        let (mirror, _) = self.rates(alpha, 1.0, PI - theta0)?;
        Ok(MemberRates { alpha, dtheta_dt_plus: plus, dtheta_dt_minus: minus, dtheta_dt_mirror: mirror, dphi_dt: dphi })
    }
}

fn mean(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    v.sum::<f64>() / n
}

/// Initial `θ̇` and `φ̇` under the accelerational spin term alone, averaged
/// over transverse-momentum directions at fixed `|p_⊥|` from `ctx`.
pub fn symmetry_probe(
    mu_a: &BigRational,
    thetas: &[f64],
    ctx: &RealizationContext,
    opts: &ProbeOptions,
) -> Result<ProbeReport, NumError> {
    if let Some(&bad) = thetas.iter().find(|t| !(t.is_finite() && **t > 0.0 && **t < PI)) {
        return Err(NumError::PoleAngle(bad));
    }
    if opts.members == 0 {
        return Err(NumError::InvalidParams("ensemble needs at least one member".into()));
    }
    let a_z = ctx
        .params
        .accel
        .map(|a| a[2])
        .ok_or_else(|| NumError::Unbound(vec!["a_z".into()]))?;
    let p_abs = ctx.p_perp[0].hypot(ctx.p_perp[1]);
    let mu = mu_a.to_f64().unwrap_or(f64::NAN);
    let rate_scale = spin_precession_rate(&ctx.params, mu, [p_abs, 0.0]).unwrap_or(0.0);
    let dt = if rate_scale > 0.0 {
        STEP_FRACTION * 2.0 * PI / rate_scale
    } else {
        STEP_FRACTION * ctx.units.time_s
    };
    let setup = MemberSetup {
        ctx,
        mu_a,
        a_z,
        p_abs,
        dt,
        width_cm: ctx.grid.length_cm() / 16.0,
        phi0: opts.phi0,
    };
    let alphas = sample_azimuths(opts);

    let mut entries = Vec::with_capacity(thetas.len());
    for &theta0 in thetas {
        let members = alphas
            .par_iter()
            .map(|&alpha| setup.member(alpha, theta0))
            .collect::<Result<Vec<_>, _>>()?;
        let phi_mean = mean(members.iter().map(|m| m.dphi_dt));
        let phi_std = mean(members.iter().map(|m| (m.dphi_dt - phi_mean).powi(2))).sqrt();
        entries.push(ProbeEntry {
            theta0,
            dtheta_dt_plus: mean(members.iter().map(|m| m.dtheta_dt_plus)),
            dtheta_dt_minus: mean(members.iter().map(|m| m.dtheta_dt_minus)),
            dtheta_dt_mirror: mean(members.iter().map(|m| m.dtheta_dt_mirror)),
            phi_drift_mean: phi_mean,
            phi_drift_std: phi_std,
            members,
            rate_scale,
        });
    }
    Ok(ProbeReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgrid::{Grid1D, PhysParams};

    fn ctx() -> RealizationContext {
        let grid = Grid1D::new(32, 1e-3).unwrap();
        RealizationContext::new(grid, PhysParams::neutron().with_accel_z(1e20), [3.7e-19, 0.0]).unwrap()
    }

    #[test]
    fn poles_rejected() {
        let q = BigRational::from_integer(0.into());
        for bad in [0.0, PI, -0.1] {
            let err = symmetry_probe(&q, &[bad], &ctx(), &ProbeOptions::default()).unwrap_err();
            assert!(matches!(err, NumError::PoleAngle(_)));
        }
    }

    #[test]
    fn member_rates_match_two_level_closed_form() {
        // precession about a×p = a|p|(−sin α, cos α, 0) gives
        // θ̇ = ω cos(φ − α) and φ̇ = ω cot θ sin(α − φ)
        let c = ctx();
        let q = BigRational::from_integer(0.into());
        let opts = ProbeOptions { members: 4, seed: 7, phi0: 0.3 };
        let theta0 = PI / 3.0;
        let report = symmetry_probe(&q, &[theta0], &c, &opts).unwrap();
        let e = &report.entries[0];
        let omega = e.rate_scale;
        for m in &e.members {
            let th = omega * (opts.phi0 - m.alpha).cos();
            let ph = omega * (m.alpha - opts.phi0).sin() / theta0.tan();
            assert!((m.dtheta_dt_plus - th).abs() < 1e-5 * omega, "{} vs {}", m.dtheta_dt_plus, th);
            assert!((m.dphi_dt - ph).abs() < 1e-5 * omega);
            assert!((m.dtheta_dt_minus + th).abs() < 1e-5 * omega);
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let opts = ProbeOptions { members: 8, seed: 42, phi0: 0.0 };
        assert_eq!(sample_azimuths(&opts), sample_azimuths(&opts));
        let other = ProbeOptions { seed: 43, ..opts.clone() };
        assert_ne!(sample_azimuths(&opts), sample_azimuths(&other));
    }
}
