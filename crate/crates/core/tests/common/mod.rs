#![allow(dead_code)]

use accel_moment::astro::Constants;
use accel_moment::hamiltonians::{build, term, HamiltonianSpec, Kind, MuA, Term, TermFlags};
use accel_moment::numgrid::{Grid1D, PhysParams, RealizationContext};
use accel_moment::opalg::OperatorExpr;

/// Thermal neutron transverse momentum, 2.2 km/s.
pub const P_THERMAL: f64 = Constants::NEUTRON_MASS * 2.2e5;

pub fn context(n: usize, length_cm: f64, a_z: f64, mu_a: f64, p_perp: [f64; 2]) -> RealizationContext {
    let grid = Grid1D::new(n, length_cm).unwrap();
    let params = PhysParams::neutron().with_accel_z(a_z).with_mu_a(mu_a);
    RealizationContext::new(grid, params, p_perp).unwrap()
}

/// Accelerational spin term with `μ_a` left symbolic for numeric binding.
pub fn accel_spin() -> OperatorExpr {
    term(Kind::Accelerational, Term::Spin, Some(&MuA::Symbolic))
}

pub fn accel_with(flags: TermFlags) -> OperatorExpr {
    build(&HamiltonianSpec::accelerational(flags, MuA::Symbolic)).unwrap()
}

/// `|1+μ_a| |a| |p_⊥| / (2 m c²)` straight from the constants table.
pub fn closed_form_rate(a: f64, mu_a: f64, p_perp: [f64; 2]) -> f64 {
    let c = Constants::C;
    (1.0 + mu_a).abs() * a.abs() * p_perp[0].hypot(p_perp[1]) / (2.0 * Constants::NEUTRON_MASS * c * c)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
