mod common;

use accel_moment::astro::Constants;
use accel_moment::boostgen::chi_prime;
use accel_moment::hamiltonians::{build, term, HamiltonianSpec, Kind, MuA, Term, TermFlags};
use accel_moment::numgrid::{hermitian_eigenvalues, realize, Grid1D, PhysParams, RealizationContext, SpinorState};
use accel_moment::opalg::vector::OpVec;
use accel_moment::opalg::{parse, OperatorExpr, ScalarCoeff, Symbol};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;

use common::{context, P_THERMAL};

fn interior_state(ctx: &RealizationContext, theta: f64, phi: f64) -> DVector<Complex64> {
    SpinorState::gaussian(ctx.grid, 0.0, ctx.grid.length_cm() / 16.0, theta, phi).unwrap().amps
}

fn max_abs(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn z_only(e: &OperatorExpr) -> OperatorExpr {
    e.filter(|g| g.x[0] == 0 && g.x[1] == 0)
}

#[test]
fn canonical_commutator_on_interior_states() {
    let ctx = context(128, 1e-3, 1.0, 0.0, [0.0, 0.0]);
    let x = realize(&OperatorExpr::x(2), &ctx).unwrap().dense();
    let p = realize(&OperatorExpr::p(2), &ctx).unwrap().dense();
    let psi = interior_state(&ctx, 0.4, 0.2);
    // ħ = 1 in scaled units
    let lhs = (&x * &p - &p * &x) * &psi;
    let rhs = &psi * Complex64::new(0.0, 1.0);
    assert!(max_abs(&(lhs - &rhs)) / max_abs(&rhs) <= 1e-6);
}

#[test]
fn spin_cross_commutator_symbolic_and_realized() {
    // [σ·(a×x), p²] = 2iħ σ·(a×p)
    let a = OpVec::from_symbols([Symbol::Ax, Symbol::Ay, Symbol::Az]);
    let lhs = OpVec::sigma().dot(&a.cross(&OpVec::x())).commutator(&OpVec::p().dot(&OpVec::p()));
    let rhs = OpVec::sigma().dot(&a.cross(&OpVec::p())).scale(&(&ScalarCoeff::from_int(2) * &(&ScalarCoeff::i() * &ScalarCoeff::symbol(Symbol::Hbar))));
    assert_eq!(lhs, rhs);

    // numeric: the z-position part of σ·(a×x) for a in the transverse plane
    let grid = Grid1D::new(64, 1e-3).unwrap();
    let mut params = PhysParams::neutron();
    params.accel = Some([3e3, -2e3, 0.0]);
    let ctx = RealizationContext::new(grid, params, [P_THERMAL, 0.5 * P_THERMAL]).unwrap();
    let a_realizable = z_only(&OpVec::sigma().dot(&a.cross(&OpVec::x())));
    let p2 = OpVec::p().dot(&OpVec::p());
    let sym = realize(&a_realizable.commutator(&p2), &ctx).unwrap().dense();
    let ra = realize(&a_realizable, &ctx).unwrap().dense();
    let rb = realize(&p2, &ctx).unwrap().dense();
    for (theta, phi) in [(0.3, 0.0), (1.2, 2.0), (2.5, -1.0)] {
        let psi = interior_state(&ctx, theta, phi);
        let num = (&ra * &rb - &rb * &ra) * &psi;
        let exact = &sym * &psi;
        assert!(max_abs(&(num - &exact)) / max_abs(&exact) <= 1e-6);
    }
}

#[test]
fn accelerational_spectrum_splits_by_spin_term() {
    let mu = BigRational::from_integer(0.into());
    // the splitting is ħ|p_⊥|/(4mcL) of the potential scale, so it only
    // clears double precision on a short grid with fast transverse motion
    let mc = Constants::NEUTRON_MASS * Constants::C;
    let p_perp = [0.08 * mc, 0.06 * mc];
    let a_z = 4e30;
    let ctx = context(64, 1e-11, a_z, 0.0, p_perp);
    let full = build(&HamiltonianSpec::accelerational(TermFlags::all().with(Term::Tidal, false), MuA::Value(mu.clone())))
        .unwrap();
    let orbital = full.sub(&term(Kind::Accelerational, Term::Spin, Some(&MuA::Value(mu))));
    let h = realize(&full, &ctx).unwrap();
    assert!(h.hermitian);
    let o = realize(&orbital, &ctx).unwrap();
    let n = ctx.grid.n_points();
    let up_block: DMatrix<Complex64> = o.matrix.view((0, 0), (n, n)).into_owned();
    let kappa = hermitian_eigenvalues(&up_block).unwrap();

    // independent two-level splitting ħ a |p_⊥| / (4 m c²), in scaled energy units
    let c = Constants::C;
    let k_cgs = Constants::HBAR * a_z * p_perp[0].hypot(p_perp[1]) / (4.0 * Constants::NEUTRON_MASS * c * c);
    let k = ctx.units.energy_to_scaled(k_cgs);
    let mut expected: Vec<f64> = kappa.iter().flat_map(|&e| [e - k, e + k]).collect();
    expected.sort_by(f64::total_cmp);
    let mut got = hermitian_eigenvalues(&h.matrix).unwrap();
    got.sort_by(f64::total_cmp);
    let scale = got.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let dev = got.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-10 * scale, "deviation {} vs scale {}", dev, scale);
    assert!(k > 1e-6 * scale, "splitting must be resolvable");
}

#[test]
fn boost_finite_difference_matches_symbolic_increment() {
    // a = a_x x̂ so that a·χ′ has a z-position part; transverse pieces are pinned away
    let grid = Grid1D::new(64, 1e-3).unwrap();
    let mut params = PhysParams::neutron();
    params.accel = Some([1e22, 0.0, 0.0]);
    let ctx = RealizationContext::new(grid, params, [P_THERMAL, 0.0]).unwrap();
    let a = OpVec::from_symbols([Symbol::Ax, Symbol::Ay, Symbol::Az]);
    let gen = z_only(&chi_prime(&BigRational::from_integer(0.into())).along(&a));
    let h0 = build(&HamiltonianSpec::free()).unwrap();
    let increment = gen.commutator(&h0).scale(&ScalarCoeff::i());
    assert!(increment.all_monomials_have_sigma());

    let g = realize(&gen, &ctx).unwrap().dense();
    // the rest-mass identity commutes with everything and is left out
    let h = realize(&h0, &ctx).unwrap().matrix;
    let inc = realize(&increment, &ctx).unwrap().dense();
    let psi = interior_state(&ctx, 0.9, 0.4);
    let target = &inc * &psi;
    let i = Complex64::new(0.0, 1.0);
    let id = DMatrix::<Complex64>::identity(g.nrows(), g.ncols());
    let g_norm = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let errors: Vec<f64> = (0..4)
        .map(|k| {
            let eps = 1e-2 / g_norm / 2f64.powi(k);
            let m = (&id + &g * (i * eps)) * &h * (&id - &g * (i * eps)) - &h;
            max_abs(&(m * &psi - &target * Complex64::new(eps, 0.0)))
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "error ratio {} in {:?}", ratio, errors);
    }
}

#[test]
fn tidal_term_is_realized_untagged() {
    let grid = Grid1D::new(32, 1e-3).unwrap();
    let params = PhysParams::neutron().with_gravity_z(-981.0);
    let ctx = RealizationContext::new(grid, params, [0.0, 0.0]).unwrap();
    let tidal = term(Kind::Gravitational, Term::Tidal, None);
    let m = realize(&tidal, &ctx).unwrap();
    assert!(!m.hermitian);
    assert!(realize(&parse("g_z * x_z").unwrap(), &ctx).unwrap().hermitian);
}
