//! The symbolic check suite behind `verify`.

use std::io::Write;

use accel_moment::boostgen::{
    accel_spin_term, calibrate, calibrated_increment, chi_prime, trajectory_neutrality_check, CALIBRATED,
};
use accel_moment::hamiltonians::{
    build, equivalence_residual, expected_residual_mu_zero, spin_orbit_identity_check, spin_term_ratio_of, term,
    HamiltonianSpec, Kind, MuA, Term, TermFlags,
};
use accel_moment::opalg::{parse, Bindings, OperatorExpr, ScalarCoeff};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::CliError;

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mutation {
    /// Doubles the accelerational spin coefficient before the ratio check.
    SpinCoefficient,
}

struct Report<W> {
    out: W,
    failed: usize,
    total: usize,
}

impl<W: Write> Report<W> {
    fn check(&mut self, ok: bool, name: &str, detail: String) -> Result<(), CliError> {
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        if detail.is_empty() {
            writeln!(self.out, "{} {}", tag, name)?;
        } else {
            writeln!(self.out, "{} {}: {}", tag, name, detail)?;
        }
        Ok(())
    }

    fn info(&mut self, line: String) -> Result<(), CliError> {
        writeln!(self.out, "INFO {}", line)?;
        Ok(())
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// Runs every check, printing one line each. Returns whether all passed.
pub fn run<W: Write>(
    out: W,
    mu_a: &BigRational,
    mutation: Option<Mutation>,
    exprs: &[String],
) -> Result<bool, CliError> {
    let parsed = exprs
        .iter()
        .map(|s| parse(s).map_err(|e| CliError::Usage(format!("cannot parse expression `{}`: {}", s, e))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = Report { out, failed: 0, total: 0 };
    let mu = MuA::Value(mu_a.clone());

    let free = build(&HamiltonianSpec::free()).map_err(compute)?;
    let grav = build(&HamiltonianSpec::gravitational(TermFlags::without_tidal())).map_err(compute)?;
    let acc = build(&HamiltonianSpec::accelerational(TermFlags::without_tidal(), MuA::Symbolic)).map_err(compute)?;
    r.check(
        free.is_hermitian() && grav.is_hermitian() && acc.is_hermitian(),
        "hermiticity",
        "free, gravitational (tidal off) and accelerational Hamiltonians equal their adjoints".into(),
    )?;
    let tidal = term(Kind::Gravitational, Term::Tidal, None);
    r.info(format!("tidal term is not Hermitian: T^dagger - T = {}", tidal.adjoint().sub(&tidal)))?;

    let grav_spin = build(&HamiltonianSpec::gravitational(TermFlags::only(Term::Spin))).map_err(compute)?;
    let mut acc_spin = build(&HamiltonianSpec::accelerational(TermFlags::only(Term::Spin), MuA::int(0)))
        .map_err(compute)?
        .substitute(&Bindings::accel_to_minus_gravity())
        .map_err(compute)?;
    if mutation == Some(Mutation::SpinCoefficient) {
        acc_spin = acc_spin.scale(&ScalarCoeff::from_int(2));
    }
    match spin_term_ratio_of(&grav_spin, &acc_spin) {
        Ok(ratio) => r.check(ratio == q(-2), "spin-term ratio", format!("gravitational / accelerational = {} at mu_a = 0", ratio))?,
        Err(e) => r.check(false, "spin-term ratio", e.to_string())?,
    }

    // the residual is (1/2 + (1+mu_a)/4) of the gravitational spin term
    let residual = equivalence_residual(&mu, false).map_err(compute)?;
    let expected = expected_residual_mu_zero()
        .scale(&ScalarCoeff::from_rational((q(3) + mu_a) / q(3)));
    r.check(residual == expected, &format!("residual at mu_a = {}", mu_a), residual.to_string())?;
    if (BigRational::one() + mu_a).is_zero() {
        r.info(format!(
            "the accelerational spin term vanishes at mu_a = {}; the residual is the whole gravitational spin term",
            mu_a
        ))?;
    }

    let zero_at_minus_three = equivalence_residual(&MuA::int(-3), false).map_err(compute)?.is_zero();
    let sweep: Vec<BigRational> = (-10..=4).map(|k| BigRational::new(k.into(), 2.into())).filter(|v| *v != q(-3)).collect();
    let mut nonzero_elsewhere = true;
    for v in &sweep {
        nonzero_elsewhere &= !equivalence_residual(&MuA::Value(v.clone()), false).map_err(compute)?.is_zero();
    }
    r.check(
        zero_at_minus_three && nonzero_elsewhere,
        "mu_a = -3 nullification",
        "residual vanishes at -3 and nowhere else on -5..2 step 1/2".into(),
    )?;

    match calibrate() {
        Ok(cal) => {
            for rep in &cal.reports {
                r.info(format!(
                    "convention {}: hermitian {}, matches spin term on beta = +1 {}, matches including beta {}",
                    rep.convention,
                    yes_no(rep.hermitian),
                    yes_no(rep.matches_particle_sector),
                    yes_no(rep.matches_with_beta)
                ))?;
            }
            r.check(cal.chosen == CALIBRATED, "generator calibration", format!("chosen convention {}", cal.chosen))?;
        }
        Err(e) => r.check(false, "generator calibration", e.to_string())?,
    }

    let inc = calibrated_increment(mu_a).map_err(compute)?;
    let target = accel_spin_term(mu_a);
    r.check(
        inc.is_hermitian() && inc.project_beta(true) == target.project_beta(true),
        &format!("generator reproduces the spin term at mu_a = {}", mu_a),
        inc.to_string(),
    )?;

    let neutral = trajectory_neutrality_check(&chi_prime(mu_a), &free).map_err(compute)?;
    r.check(neutral, "trajectory neutrality", "every generated monomial carries sigma".into())?;

    r.check(spin_orbit_identity_check(), "spin-orbit identity", "sigma.(x cross p) = (2/hbar) L.S".into())?;

    for (src, e) in exprs.iter().zip(&parsed) {
        r.check(e.is_hermitian(), &format!("hermiticity of `{}`", src), adjoint_defect(e))?;
    }

    writeln!(r.out, "{} of {} checks passed", r.total - r.failed, r.total)?;
    Ok(r.failed == 0)
}

fn adjoint_defect(e: &OperatorExpr) -> String {
    let d = e.adjoint().sub(e);
    if d.is_zero() {
        String::new()
    } else {
        format!("adjoint minus expression = {}", d)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn output(mu: i64, mutation: Option<Mutation>) -> (bool, String) {
        let mut buf = Vec::new();
        let ok = run(&mut buf, &q(mu), mutation, &[]).unwrap();
        (ok, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn default_suite_passes() {
        let (ok, text) = output(0, None);
        assert!(ok, "{}", text);
        assert!(!text.contains("FAIL"));
    }

    #[test]
    fn mutation_fails_only_the_ratio() {
        let (ok, text) = output(0, Some(Mutation::SpinCoefficient));
        assert!(!ok);
        let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
        assert_eq!(fails.len(), 1);
        assert!(fails[0].starts_with("FAIL spin-term ratio"));
    }

    #[test]
    fn mu_minus_one_notes_vanishing_spin_term() {
        let (ok, text) = output(-1, None);
        assert!(ok, "{}", text);
        assert!(text.contains("vanishes at mu_a = -1"));
    }

    #[test]
    fn user_expressions_are_checked() {
        let mut buf = Vec::new();
        let ok = run(&mut buf, &q(0), None, &["x_z * p_z".into(), "x_z * p_z + p_z * x_z".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!ok);
        assert!(text.contains("FAIL hermiticity of `x_z * p_z`"));
        assert!(text.contains("PASS hermiticity of `x_z * p_z + p_z * x_z`"));
    }
}
