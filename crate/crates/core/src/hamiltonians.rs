//! First-order gravitational and accelerational FW Hamiltonians, term by
//! term, with the field along `ẑ` (`g = g_z ẑ`, `a = a_z ẑ`).
//!
//! Gravitational:
//! `βmc² − βm g·x + βp²/2m − (β/2mc²) p·(g·x)p + (ħβ/2mc²) σ·(g×p) − (β/mc²)(p·g)(x·p)`
//!
//! Accelerational:
//! `βmc² + βm a·x + βp²/2m + (β/2mc²) p·(a·x)p + (1+μ_a)(ħβ/4mc²) σ·(a×p)`
//!
//! The last gravitational term is the tidal term. It is built with its
//! literal operator ordering and is not Hermitian on its own.

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::opalg::vector::OpVec;
use crate::opalg::{
    cq_real, AlgebraError, Bindings, GenPart, OperatorExpr, ScalarCoeff, Symbol,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonianError {
    #[error("invalid Hamiltonian spec: {0}")]
    InvalidSpec(String),
    #[error("spin-term ratio undefined: accelerational spin coefficient vanishes")]
    DivisionByZero,
    #[error("spin coefficients are not proportional")]
    NotProportional,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Gravitational,
    Accelerational,
    Free,
}

/// Individual terms of the Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    RestMass,
    Potential,
    Kinetic,
    KineticRedshift,
    Spin,
    Tidal,
}

impl Term {
    pub const ALL: [Term; 6] = [
        Term::RestMass,
        Term::Potential,
        Term::Kinetic,
        Term::KineticRedshift,
        Term::Spin,
        Term::Tidal,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermFlags {
    pub rest_mass: bool,
    pub potential: bool,
    pub kinetic: bool,
    pub kinetic_redshift: bool,
    pub spin: bool,
    pub tidal: bool,
}

impl TermFlags {
    pub fn all() -> Self {
        Self {
            rest_mass: true,
            potential: true,
            kinetic: true,
            kinetic_redshift: true,
            spin: true,
            tidal: true,
        }
    }

    pub fn without_tidal() -> Self {
        Self { tidal: false, ..Self::all() }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn only(term: Term) -> Self {
        Self::none().with(term, true)
    }

    pub fn get(&self, term: Term) -> bool {
        match term {
            Term::RestMass => self.rest_mass,
            Term::Potential => self.potential,
            Term::Kinetic => self.kinetic,
            Term::KineticRedshift => self.kinetic_redshift,
            Term::Spin => self.spin,
            Term::Tidal => self.tidal,
        }
    }

    pub fn with(mut self, term: Term, on: bool) -> Self {
        let slot = match term {
            Term::RestMass => &mut self.rest_mass,
            Term::Potential => &mut self.potential,
            Term::Kinetic => &mut self.kinetic,
            Term::KineticRedshift => &mut self.kinetic_redshift,
            Term::Spin => &mut self.spin,
            Term::Tidal => &mut self.tidal,
        };
        *slot = on;
        self
    }
}

/// Value of the anomalous acceleration moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MuA {
    Value(BigRational),
    Symbolic,
}

impl MuA {
    pub fn int(n: i64) -> Self {
        MuA::Value(BigRational::from_integer(n.into()))
    }

    /// `1 + μ_a` as a scalar.
    pub fn one_plus(&self) -> ScalarCoeff {
        match self {
            MuA::Value(q) => ScalarCoeff::from_rational(BigRational::one() + q),
            MuA::Symbolic => &ScalarCoeff::one() + &ScalarCoeff::symbol(Symbol::MuA),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianSpec {
    pub kind: Kind,
    pub flags: TermFlags,
    pub mu_a: Option<MuA>,
}

impl HamiltonianSpec {
    pub fn gravitational(flags: TermFlags) -> Self {
        Self { kind: Kind::Gravitational, flags, mu_a: None }
    }

    pub fn accelerational(flags: TermFlags, mu_a: MuA) -> Self {
        Self { kind: Kind::Accelerational, flags, mu_a: Some(mu_a) }
    }

    pub fn free() -> Self {
        Self {
            kind: Kind::Free,
            flags: TermFlags { rest_mass: true, kinetic: true, ..TermFlags::none() },
            mu_a: None,
        }
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        match (self.kind, &self.mu_a) {
            (Kind::Accelerational, None) => {
                return Err(HamiltonianError::InvalidSpec("accelerational spec needs mu_a".into()))
            }
            (Kind::Gravitational | Kind::Free, Some(_)) => {
                return Err(HamiltonianError::InvalidSpec("mu_a is only valid for the accelerational kind".into()))
            }
            _ => {}
        }
        if self.kind == Kind::Accelerational && self.flags.tidal {
            return Err(HamiltonianError::InvalidSpec("the tidal term exists only in the gravitational Hamiltonian".into()));
        }
        if self.kind == Kind::Free {
            let f = self.flags;
            if f.potential || f.kinetic_redshift || f.spin || f.tidal {
                return Err(HamiltonianError::InvalidSpec(
                    "the free Hamiltonian has only rest-mass and kinetic terms".into(),
                ));
            }
        }
        Ok(())
    }
}

fn sym(s: Symbol) -> ScalarCoeff {
    ScalarCoeff::symbol(s)
}

fn sym_pow(s: Symbol, k: i32) -> ScalarCoeff {
    ScalarCoeff::symbol_pow(s, k)
}

fn prod(factors: &[ScalarCoeff]) -> ScalarCoeff {
    factors.iter().fold(ScalarCoeff::one(), |acc, f| &acc * f)
}

/// The field vector of a kind: `g_z ẑ` or `a_z ẑ`.
fn field(kind: Kind) -> OpVec {
    match kind {
        Kind::Gravitational => OpVec::along_z(Symbol::Gz),
        _ => OpVec::along_z(Symbol::Az),
    }
}

/// `Σ_i p_i (f·x) p_i` with the ordering written literally.
fn sandwich(f: &OpVec) -> OperatorExpr {
    let fx = f.dot(&OpVec::x());
    (0..3).fold(OperatorExpr::zero(), |acc, i| {
        let pi = OperatorExpr::p(i);
        acc.add(&pi.mul(&fx).mul(&pi))
    })
}

/// One term of a Hamiltonian, including its sign and `β`.
pub fn term(kind: Kind, term: Term, mu_a: Option<&MuA>) -> OperatorExpr {
    let beta = OperatorExpr::beta();
    let f = field(kind);
    let grav = kind == Kind::Gravitational;
    let sign = if grav { -1 } else { 1 };
    let m = || sym(Symbol::M);
    let inv_mc2 = || prod(&[sym_pow(Symbol::M, -1), sym_pow(Symbol::C, -2)]);
    match (kind, term) {
        (_, Term::RestMass) => beta.scale(&prod(&[m(), sym_pow(Symbol::C, 2)])),
        (_, Term::Kinetic) => {
            let p2 = OpVec::p().dot(&OpVec::p());
            beta.mul(&p2).scale(&prod(&[ScalarCoeff::ratio(1, 2), sym_pow(Symbol::M, -1)]))
        }
        (Kind::Free, _) => OperatorExpr::zero(),
        (_, Term::Potential) => beta
            .mul(&f.dot(&OpVec::x()))
            .scale(&prod(&[ScalarCoeff::from_int(sign), m()])),
        (_, Term::KineticRedshift) => beta
            .mul(&sandwich(&f))
            .scale(&prod(&[ScalarCoeff::ratio(sign, 2), inv_mc2()])),
        (Kind::Gravitational, Term::Spin) => beta
            .mul(&OpVec::sigma().dot(&f.cross(&OpVec::p())))
            .scale(&prod(&[ScalarCoeff::ratio(1, 2), sym(Symbol::Hbar), inv_mc2()])),
        (Kind::Accelerational, Term::Spin) => {
            let one_plus = mu_a.map(MuA::one_plus).unwrap_or_else(ScalarCoeff::one);
            beta.mul(&OpVec::sigma().dot(&f.cross(&OpVec::p())))
                .scale(&prod(&[one_plus, ScalarCoeff::ratio(1, 4), sym(Symbol::Hbar), inv_mc2()]))
        }
        (Kind::Gravitational, Term::Tidal) => {
            let pg = OpVec::p().dot(&f);
            let xp = OpVec::x().dot(&OpVec::p());
            beta.mul(&pg).mul(&xp).scale(&-&inv_mc2())
        }
        (Kind::Accelerational, Term::Tidal) => OperatorExpr::zero(),
    }
}

/// Assembles the flag-selected terms of `spec`.
pub fn build(spec: &HamiltonianSpec) -> Result<OperatorExpr, HamiltonianError> {
    spec.validate()?;
    Ok(Term::ALL
        .iter()
        .filter(|t| spec.flags.get(**t))
        .fold(OperatorExpr::zero(), |acc, t| acc.add(&term(spec.kind, *t, spec.mu_a.as_ref()))))
}

/// `build(gravitational) − build(accelerational)|_{a=−g}`.
pub fn equivalence_residual(mu_a: &MuA, include_tidal: bool) -> Result<OperatorExpr, HamiltonianError> {
    let grav = build(&HamiltonianSpec::gravitational(TermFlags::all().with(Term::Tidal, include_tidal)))?;
    let acc = build(&HamiltonianSpec::accelerational(TermFlags::without_tidal(), mu_a.clone()))?;
    let acc = acc.substitute(&Bindings::accel_to_minus_gravity())?;
    Ok(grav.sub(&acc))
}

/// Generator part `β σ_y p_x`, which carries the `σ·(f×p)` coefficient for
/// a field `f = f_z ẑ` (`σ·(f×p) = f_z (σ_y p_x − σ_x p_y)`).
pub fn spin_pattern() -> GenPart {
    GenPart::beta().with_p(0, 1).with_sigma(1)
}

/// Ratio of the `σ·(g×p)` coefficients of two Hamiltonians already expressed
/// in terms of `g`.
pub fn spin_term_ratio_of(grav: &OperatorExpr, acc: &OperatorExpr) -> Result<BigRational, HamiltonianError> {
    let pattern = spin_pattern();
    let num = grav.coefficient_of(&pattern);
    let den = acc.coefficient_of(&pattern);
    if den.is_zero() {
        return Err(HamiltonianError::DivisionByZero);
    }
    let q = num.proportionality(&den).ok_or(HamiltonianError::NotProportional)?;
    if !q.im.is_zero() {
        return Err(HamiltonianError::NotProportional);
    }
    Ok(q.re)
}

/// Ratio of the gravitational spin coefficient to the accelerational one at
/// `a = −g`; `−2` for `μ_a = 0`.
pub fn spin_term_ratio(mu_a: &BigRational) -> Result<BigRational, HamiltonianError> {
    let grav = build(&HamiltonianSpec::gravitational(TermFlags::only(Term::Spin)))?;
    let acc = build(&HamiltonianSpec::accelerational(TermFlags::only(Term::Spin), MuA::Value(mu_a.clone())))?
        .substitute(&Bindings::accel_to_minus_gravity())?;
    spin_term_ratio_of(&grav, &acc)
}

/// Checks `σ·(x×p) = (2/ħ) L·S` with `L = x×p`, `S = ħσ/2`, and the uniform
/// reading `σ·(g×p) = −Φc² σ·(x×p) = −(2Φc²/ħ) L·S` for `g = −Φc² x`.
/// `ls_factor` is the prefactor in front of `L·S/ħ`; the identity holds for 2.
pub fn spin_orbit_identity_holds(ls_factor: &BigRational) -> bool {
    let x = OpVec::x();
    let p = OpVec::p();
    let sigma = OpVec::sigma();
    let hbar = sym(Symbol::Hbar);
    let inv_hbar = sym_pow(Symbol::Hbar, -1);
    let l = x.cross(&p);
    let s = sigma.scale(&prod(&[ScalarCoeff::ratio(1, 2), hbar]));
    let lhs = sigma.dot(&l);
    let factor = ScalarCoeff::from_rational(ls_factor.clone());
    let rhs = l.dot(&s).scale(&prod(&[factor.clone(), inv_hbar.clone()]));
    if lhs != rhs {
        return false;
    }
    let phi_c2 = prod(&[sym(Symbol::Phi), sym_pow(Symbol::C, 2)]);
    let g = x.scale(&-&phi_c2);
    let spin_orbit = sigma.dot(&g.cross(&p));
    let via_xp = lhs.scale(&-&phi_c2);
    let via_ls = l.dot(&s).scale(&prod(&[-&phi_c2, factor, inv_hbar]));
    spin_orbit == via_xp && spin_orbit == via_ls
}

pub fn spin_orbit_identity_check() -> bool {
    spin_orbit_identity_holds(&BigRational::from_integer(2.into()))
}

/// The `(3/4)(ħβ/mc²) σ·(g×p)` residual expected at `μ_a = 0`.
pub fn expected_residual_mu_zero() -> OperatorExpr {
    let g = OpVec::along_z(Symbol::Gz);
    OperatorExpr::beta()
        .mul(&OpVec::sigma().dot(&g.cross(&OpVec::p())))
        .scale(&prod(&[
            ScalarCoeff::from_complex(cq_real(BigRational::new(3.into(), 4.into()))),
            sym(Symbol::Hbar),
            sym_pow(Symbol::M, -1),
            sym_pow(Symbol::C, -2),
        ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::parse;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn free_hamiltonian() {
        let h = build(&HamiltonianSpec::free()).unwrap();
        let expected = parse("beta * m * c^2 + 1/2 * m^-1 * beta * (p_x^2 + p_y^2 + p_z^2)").unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn gravitational_spin_coefficient() {
        let h = build(&HamiltonianSpec::gravitational(TermFlags::all())).unwrap();
        let c = h.coefficient_of(&spin_pattern());
        assert_eq!(c, parse("1/2 * hbar * m^-1 * c^-2 * g_z").unwrap().coefficient_of(&GenPart::identity()));
        let partner = h.coefficient_of(&GenPart::beta().with_p(1, 1).with_sigma(0));
        assert_eq!(partner, -&c);
    }

    #[test]
    fn accelerational_spin_coefficient() {
        let h = build(&HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::int(0))).unwrap();
        let c = h.coefficient_of(&spin_pattern());
        assert_eq!(c, parse("1/4 * hbar * m^-1 * c^-2 * a_z").unwrap().coefficient_of(&GenPart::identity()));
        // β σ_x p_y carries the sign partner −(1+μ_a)ħ a_z/(4mc²)
        let sym = build(&HamiltonianSpec::accelerational(TermFlags::only(Term::Spin), MuA::Symbolic)).unwrap();
        let partner = sym.coefficient_of(&GenPart::beta().with_p(1, 1).with_sigma(0));
        let expected = parse("-1/4 * (1 + mu_a) * hbar * m^-1 * c^-2 * a_z").unwrap();
        assert_eq!(partner, expected.coefficient_of(&GenPart::identity()));
    }

    #[test]
    fn potential_coefficient() {
        let h = build(&HamiltonianSpec::gravitational(TermFlags::all())).unwrap();
        let c = h.coefficient_of(&GenPart::beta().with_x(2, 1));
        assert_eq!(c, parse("-1 * m * g_z").unwrap().coefficient_of(&GenPart::identity()));
    }

    #[test]
    fn tidal_flag_rejected_for_acceleration() {
        let spec = HamiltonianSpec::accelerational(TermFlags::all(), MuA::int(0));
        assert!(matches!(build(&spec), Err(HamiltonianError::InvalidSpec(_))));
        let spec = HamiltonianSpec { mu_a: None, ..spec };
        assert!(build(&spec).is_err());
        let spec = HamiltonianSpec { mu_a: Some(MuA::int(0)), ..HamiltonianSpec::free() };
        assert!(build(&spec).is_err());
    }

    #[test]
    fn hermiticity() {
        let specs = [
            HamiltonianSpec::free(),
            HamiltonianSpec::gravitational(TermFlags::without_tidal()),
            HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::int(0)),
            HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::int(-3)),
            HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::Symbolic),
        ];
        for s in &specs {
            assert!(build(s).unwrap().is_hermitian(), "{:?}", s);
        }
    }

    #[test]
    fn tidal_term_is_not_hermitian_in_isolation() {
        // ((p·g)(x·p))† − (p·g)(x·p) = −2iħ g_z p_z ⇒ T† − T = (2iħ/mc²) β g_z p_z
        let t = term(Kind::Gravitational, Term::Tidal, None);
        let diff = t.adjoint().sub(&t);
        let expected = parse("2 * i * hbar * m^-1 * c^-2 * g_z * beta * p_z").unwrap();
        assert_eq!(diff, expected);
    }

    #[test]
    fn residual_values() {
        assert!(equivalence_residual(&MuA::int(-3), false).unwrap().is_zero());
        assert_eq!(equivalence_residual(&MuA::int(0), false).unwrap(), expected_residual_mu_zero());
        let tidal = term(Kind::Gravitational, Term::Tidal, None);
        assert_eq!(equivalence_residual(&MuA::int(-3), true).unwrap(), tidal);
    }

    #[test]
    fn residual_is_affine_in_mu() {
        let r = equivalence_residual(&MuA::Symbolic, false).unwrap();
        assert!(r.all_monomials_have_sigma());
        // coefficient of β σ_y p_x: (1/2 + (1+μ)/4) ħ g_z/(mc²) = (3+μ)/4 · ħ g_z/(mc²)
        let c = r.coefficient_of(&spin_pattern());
        let expected = parse("1/4 * (3 + mu_a) * hbar * g_z * m^-1 * c^-2").unwrap();
        assert_eq!(c, expected.coefficient_of(&GenPart::identity()));
    }

    #[test]
    fn ratios() {
        assert_eq!(spin_term_ratio(&q(0, 1)).unwrap(), q(-2, 1));
        assert_eq!(spin_term_ratio(&q(-3, 1)).unwrap(), q(1, 1));
        assert_eq!(spin_term_ratio(&q(-1, 1)), Err(HamiltonianError::DivisionByZero));
    }

    #[test]
    fn spin_orbit_identity() {
        assert!(spin_orbit_identity_check());
        assert!(!spin_orbit_identity_holds(&q(1, 1)));
    }

    #[test]
    fn substitution_commutes_with_build() {
        let b = Bindings::accel_to_minus_gravity();
        let whole = build(&HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::Symbolic))
            .unwrap()
            .substitute(&b)
            .unwrap();
        let termwise = Term::ALL
            .iter()
            .filter(|t| **t != Term::Tidal)
            .map(|t| term(Kind::Accelerational, *t, Some(&MuA::Symbolic)).substitute(&b).unwrap())
            .fold(OperatorExpr::zero(), |a, t| a.add(&t));
        assert_eq!(whole, termwise);
    }

    #[test]
    fn flags_are_monotone() {
        let kinds = [
            (Kind::Gravitational, None),
            (Kind::Accelerational, Some(MuA::int(2))),
        ];
        for (kind, mu) in kinds {
            for t in Term::ALL {
                if kind == Kind::Accelerational && t == Term::Tidal {
                    continue;
                }
                let base = TermFlags::all().with(Term::Tidal, false).with(t, false);
                let spec = |flags| HamiltonianSpec { kind, flags, mu_a: mu.clone() };
                let without = build(&spec(base)).unwrap();
                let with = build(&spec(base.with(t, true))).unwrap();
                assert_eq!(with.sub(&without), term(kind, t, mu.as_ref()), "{:?} {:?}", kind, t);
            }
        }
    }

    #[test]
    fn mu_substitution_example() {
        let e = parse("1/4 * (1 + mu_a)").unwrap();
        let mut b = Bindings::new();
        b.insert_named("mu_a", "-3").unwrap();
        assert_eq!(e.substitute(&b).unwrap(), OperatorExpr::scalar(ScalarCoeff::ratio(-1, 2)));
        let e = parse("(1 + mu_a) * a_z").unwrap();
        let mut b = Bindings::new();
        b.insert_named("a_z", "-g_z").unwrap();
        assert_eq!(e.substitute(&b).unwrap(), parse("-(1 + mu_a) * g_z").unwrap());
    }
}
