//! The spin-bearing part of the acceleration generator,
//! `χ′ = (1+μ_a) (β/4ic²) σ×x`, and the Hamiltonian increment it produces
//! when commuted with the free Hamiltonian.
//!
//! The other two pieces of the full generator are not materialized:
//! `χ_Γ0` generates the potential energy `βm a·x`, and `f_χ` commutes with
//! `H_0`, so neither contributes to the spin term.
//!
//! `χ′` is anti-Hermitian (`(χ′_k)† = −χ′_k`): `σ×x` is Hermitian and the
//! explicit `1/i` makes the product anti-Hermitian. The commutator of an
//! anti-Hermitian generator with a Hermitian `H_0` is Hermitian, so the
//! plain commutator is the Hermitian convention.
//!
//! `[a·χ′, H_0]` comes out as `−(1+μ_a)(ħ/4mc²) σ·(a×p)`: the overall sign
//! is opposite to the accelerational spin term and the two `β` factors
//! multiply to one. The calibrated convention is therefore the reversed
//! commutator `[H_0, a·χ′]`, which reproduces the spin term exactly in the
//! particle sector (`β = +1`).

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::hamiltonians::{self, HamiltonianError, HamiltonianSpec, Kind, MuA, Term, TermFlags};
use crate::opalg::vector::OpVec;
use crate::opalg::{OperatorExpr, ScalarCoeff, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoostError {
    #[error("H0 is not Hermitian")]
    NonHermitian,
    #[error("no convention reproduces the accelerational spin term")]
    CalibrationFailed,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// How the generator acts on `H_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `[a·χ′, H_0]`
    Plain,
    /// `i[a·χ′, H_0]`, the first-order term of `e^{i a·χ′} H_0 e^{−i a·χ′}`.
    TimesI,
    /// `[H_0, a·χ′]`
    Reversed,
    /// `−i[a·χ′, H_0]`
    ReversedTimesI,
}

impl Convention {
    pub const ALL: [Convention; 4] = [
        Convention::Plain,
        Convention::TimesI,
        Convention::Reversed,
        Convention::ReversedTimesI,
    ];

    fn factor(self) -> ScalarCoeff {
        match self {
            Convention::Plain => ScalarCoeff::one(),
            Convention::TimesI => ScalarCoeff::i(),
            Convention::Reversed => ScalarCoeff::from_int(-1),
            Convention::ReversedTimesI => -&ScalarCoeff::i(),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Plain => "[a.chi', H0]",
            Convention::TimesI => "i[a.chi', H0]",
            Convention::Reversed => "[H0, a.chi']",
            Convention::ReversedTimesI => "-i[a.chi', H0]",
        })
    }
}

/// The convention fixed by [`calibrate`].
pub const CALIBRATED: Convention = Convention::Reversed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoostGenerator {
    pub mu_a: BigRational,
    pub components: [OperatorExpr; 3],
}

/// `χ′_k = (1+μ_a)(β/4ic²)(σ×x)_k`.
pub fn chi_prime(mu_a: &BigRational) -> BoostGenerator {
    // 1/(4i) = −i/4
    let prefactor = &(&ScalarCoeff::from_rational(BigRational::one() + mu_a) * &ScalarCoeff::ratio(-1, 4))
        * &(&ScalarCoeff::i() * &ScalarCoeff::symbol_pow(Symbol::C, -2));
    let sx = OpVec::sigma().cross(&OpVec::x());
    let beta = OperatorExpr::beta();
    BoostGenerator {
        mu_a: mu_a.clone(),
        components: sx.0.map(|c| beta.mul(&c).scale(&prefactor)),
    }
}

impl BoostGenerator {
    /// `f·χ′` for a field vector `f`.
    pub fn along(&self, field: &OpVec) -> OperatorExpr {
        OpVec(self.components.clone()).dot(field)
    }

    /// `a·χ′` with `a = a_z ẑ`.
    pub fn along_accel(&self) -> OperatorExpr {
        self.along(&OpVec::along_z(Symbol::Az))
    }
}

/// `a·χ′` acting on `H_0` under `convention`, with `a = a_z ẑ`.
pub fn boost_increment(
    gen: &BoostGenerator,
    h0: &OperatorExpr,
    convention: Convention,
) -> Result<OperatorExpr, BoostError> {
    boost_increment_along(gen, &OpVec::along_z(Symbol::Az), h0, convention)
}

/// Like [`boost_increment`] for an arbitrary field vector.
pub fn boost_increment_along(
    gen: &BoostGenerator,
    field: &OpVec,
    h0: &OperatorExpr,
    convention: Convention,
) -> Result<OperatorExpr, BoostError> {
    if !h0.is_hermitian() {
        return Err(BoostError::NonHermitian);
    }
    Ok(gen.along(field).commutator(h0).scale(&convention.factor()))
}

/// The accelerational spin term `(1+μ_a)(ħβ/4mc²) σ·(a×p)`.
pub fn accel_spin_term(mu_a: &BigRational) -> OperatorExpr {
    hamiltonians::term(Kind::Accelerational, Term::Spin, Some(&MuA::Value(mu_a.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionReport {
    pub convention: Convention,
    pub hermitian: bool,
    /// Equal to the spin term on the `β = +1` sector.
    pub matches_particle_sector: bool,
    /// Equal to the spin term including its `β` factor.
    pub matches_with_beta: bool,
    pub increment: OperatorExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calibration {
    pub chosen: Convention,
    pub reports: Vec<ConventionReport>,
}

/// Evaluates every convention at `μ_a = 0` against the accelerational spin
/// term and picks the unique Hermitian one that reproduces it.
pub fn calibrate() -> Result<Calibration, BoostError> {
    let zero = BigRational::from_integer(0.into());
    let gen = chi_prime(&zero);
    let h0 = hamiltonians::build(&HamiltonianSpec::free())?;
    let target = accel_spin_term(&zero);
    let mut reports = Vec::new();
    for conv in Convention::ALL {
        let inc = boost_increment(&gen, &h0, conv)?;
        reports.push(ConventionReport {
            convention: conv,
            hermitian: inc.is_hermitian(),
            matches_particle_sector: inc.project_beta(true) == target.project_beta(true),
            matches_with_beta: inc == target,
            increment: inc,
        });
    }
    let mut hits = reports.iter().filter(|r| r.hermitian && r.matches_particle_sector);
    let chosen = match (hits.next(), hits.next()) {
        (Some(r), None) => r.convention,
        _ => return Err(BoostError::CalibrationFailed),
    };
    Ok(Calibration { chosen, reports })
}

/// Increment under the calibrated convention with `H_0 = build(free)`.
pub fn calibrated_increment(mu_a: &BigRational) -> Result<OperatorExpr, BoostError> {
    let h0 = hamiltonians::build(&HamiltonianSpec::free())?;
    boost_increment(&chi_prime(mu_a), &h0, CALIBRATED)
}

/// True iff every monomial generated from `H_0` carries a Pauli factor,
/// i.e. the generator adds no spin-independent force.
pub fn trajectory_neutrality_check(gen: &BoostGenerator, h0: &OperatorExpr) -> Result<bool, BoostError> {
    Ok(boost_increment(gen, h0, CALIBRATED)?.all_monomials_have_sigma())
}

/// Free Hamiltonian with only the given flags (for the `βmc²` example).
pub fn free_part(rest_mass: bool, kinetic: bool) -> Result<OperatorExpr, BoostError> {
    let spec = HamiltonianSpec {
        flags: TermFlags { rest_mass, kinetic, ..TermFlags::none() },
        ..HamiltonianSpec::free()
    };
    Ok(hamiltonians::build(&spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{parse, Bindings};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn generator_at_zero() {
        let g = chi_prime(&q(0));
        // χ′_z = −(i/4c²) β (σ_x x_y − σ_y x_x)
        let expected = parse("-1/4 * i * c^-2 * beta * (s_x * x_y - s_y * x_x)").unwrap();
        assert_eq!(g.components[2], expected);
        for c in &g.components {
            assert!(c.is_anti_hermitian());
            assert!(c.all_monomials_have_sigma());
        }
    }

    #[test]
    fn generator_scaling() {
        let zero = chi_prime(&q(0));
        assert!(chi_prime(&q(-1)).components.iter().all(OperatorExpr::is_zero));
        let m3 = chi_prime(&q(-3));
        for k in 0..3 {
            assert_eq!(m3.components[k], zero.components[k].scale_int(-2));
        }
    }

    #[test]
    fn rest_mass_commutes() {
        let h0 = free_part(true, false).unwrap();
        for conv in Convention::ALL {
            assert!(boost_increment(&chi_prime(&q(0)), &h0, conv).unwrap().is_zero());
        }
    }

    #[test]
    fn calibration_picks_reversed_commutator() {
        let cal = calibrate().unwrap();
        assert_eq!(cal.chosen, CALIBRATED);
        for r in &cal.reports {
            assert!(!r.matches_with_beta);
            match r.convention {
                Convention::Plain | Convention::Reversed => assert!(r.hermitian),
                _ => assert!(!r.hermitian),
            }
        }
    }

    #[test]
    fn increment_matches_spin_term_and_scales() {
        let base = calibrated_increment(&q(0)).unwrap();
        assert_eq!(base.project_beta(true), accel_spin_term(&q(0)).project_beta(true));
        assert!(base.is_hermitian());
        for mu in [-3, -1, 1, 2, 7] {
            let inc = calibrated_increment(&q(mu)).unwrap();
            assert_eq!(inc, base.scale_int(1 + mu));
        }
    }

    #[test]
    fn minus_three_matches_gravitational_spin_term() {
        let inc = calibrated_increment(&q(-3)).unwrap();
        let grav = hamiltonians::term(Kind::Gravitational, Term::Spin, None);
        let inc_g = inc.substitute(&Bindings::accel_to_minus_gravity()).unwrap();
        assert_eq!(inc_g.project_beta(true), grav.project_beta(true));
    }

    #[test]
    fn general_direction_commutator() {
        // [σ·(a×x), p²] = 2iħ σ·(a×p)
        let a = OpVec::from_symbols(Symbol::accel());
        let lhs = OpVec::sigma()
            .dot(&a.cross(&OpVec::x()))
            .commutator(&OpVec::p().dot(&OpVec::p()));
        let rhs = OpVec::sigma()
            .dot(&a.cross(&OpVec::p()))
            .scale(&(&ScalarCoeff::i() * &ScalarCoeff::symbol(Symbol::Hbar)))
            .scale_int(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn neutrality() {
        let h0 = hamiltonians::build(&HamiltonianSpec::free()).unwrap();
        assert!(trajectory_neutrality_check(&chi_prime(&q(0)), &h0).unwrap());
        assert!(trajectory_neutrality_check(&chi_prime(&q(7)), &h0).unwrap());
        let mut bad = chi_prime(&q(0));
        bad.components[2] = bad.components[2].add(&OperatorExpr::x(0).scale(&ScalarCoeff::i()));
        assert!(!trajectory_neutrality_check(&bad, &h0).unwrap());
    }

    #[test]
    fn non_hermitian_h0_rejected() {
        let h0 = OperatorExpr::x(2).mul(&OperatorExpr::p(2));
        assert_eq!(
            boost_increment(&chi_prime(&q(0)), &h0, CALIBRATED),
            Err(BoostError::NonHermitian)
        );
    }
}
