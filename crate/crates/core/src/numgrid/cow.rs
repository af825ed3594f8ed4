use super::{NumError, PhysParams};
use crate::hamiltonians::{term, Kind, Term};
use crate::opalg::GenPart;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CowKind {
    Gravitational,
    Accelerational,
}

/// Interferometer arms separated by `height_difference_cm` along the field
/// axis, both traversed in `traversal_time_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CowGeometry {
    pub height_difference_cm: f64,
    pub traversal_time_s: f64,
}

/// Semiclassical phase difference `−(1/ħ) ∫ ΔV dt` between the arms, where
/// `V` is the potential term of the chosen Hamiltonian evaluated at `β = +1`.
pub fn cow_phase(kind: CowKind, geometry: CowGeometry, params: &PhysParams) -> Result<f64, NumError> {
    let CowGeometry { height_difference_cm: h, traversal_time_s: t } = geometry;
    if !(h.is_finite() && h >= 0.0 && t.is_finite() && t >= 0.0) {
        return Err(NumError::InvalidParams(format!(
            "geometry must be non-negative and finite, got height {} cm, time {} s",
            h, t
        )));
    }
    let kind = match kind {
        CowKind::Gravitational => Kind::Gravitational,
        CowKind::Accelerational => Kind::Accelerational,
    };
    let potential = term(kind, Term::Potential, None);
    // coefficient of β z: the force constant of the linear potential
    let slope = potential
        .coefficient_of(&GenPart::beta().with_x(2, 1))
        .eval(|s| params.value(s))?
        .re;
    // adding 0.0 turns a −0 phase into +0
    Ok(-slope * h * t / params.hbar + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(h: f64, t: f64) -> CowGeometry {
        CowGeometry { height_difference_cm: h, traversal_time_s: t }
    }

    #[test]
    fn zero_height_gives_zero_phase() {
        let p = PhysParams::neutron().with_gravity_z(-980.0);
        let phase = cow_phase(CowKind::Gravitational, geometry(0.0, 1e-4), &p).unwrap();
        assert_eq!(phase, 0.0);
        assert!(phase.is_sign_positive());
    }

    #[test]
    fn matches_hand_formula() {
        let p = PhysParams::neutron().with_gravity_z(-980.0);
        let phase = cow_phase(CowKind::Gravitational, geometry(3.0, 1e-4), &p).unwrap();
        let expected = -p.m * 980.0 * 3.0 * 1e-4 / p.hbar;
        assert!(((phase - expected) / expected).abs() < 1e-14);
    }

    #[test]
    fn linear_in_time_and_unbound_field_rejected() {
        let p = PhysParams::neutron().with_accel_z(980.0);
        let one = cow_phase(CowKind::Accelerational, geometry(2.0, 1e-4), &p).unwrap();
        let two = cow_phase(CowKind::Accelerational, geometry(2.0, 2e-4), &p).unwrap();
        assert!((two - 2.0 * one).abs() <= 1e-14 * two.abs());
        assert!(cow_phase(CowKind::Gravitational, geometry(2.0, 1e-4), &p).is_err());
        assert!(cow_phase(CowKind::Accelerational, geometry(-1.0, 1e-4), &p).is_err());
    }
}
