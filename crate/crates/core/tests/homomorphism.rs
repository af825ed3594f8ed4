mod common;

use accel_moment::numgrid::{realize, SpinorState};
use accel_moment::opalg::{GenPart, OperatorExpr, ScalarCoeff};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use common::context;

/// Low-degree expressions built only from realizable generators.
fn realizable() -> impl Strategy<Value = OperatorExpr> {
    let mono = (-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=1, 0usize..4, any::<bool>()).prop_map(
        |(c, xz, pz, px, s, imag)| {
            let mut g = GenPart::identity().with_x(2, xz).with_p(2, pz).with_p(0, px);
            if s < 3 {
                g = g.with_sigma(s);
            }
            let mut coeff = ScalarCoeff::from_int(c);
            if imag {
                coeff = &coeff * &ScalarCoeff::i();
            }
            OperatorExpr::term(coeff, g)
        },
    );
    prop::collection::vec(mono, 1..=3).prop_map(|v| v.iter().fold(OperatorExpr::zero(), |acc, m| acc.add(m)))
}

fn expect(m: &nalgebra::DMatrix<Complex64>, psi: &DVector<Complex64>) -> Complex64 {
    psi.dotc(&(m * psi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_realization_is_a_homomorphism(a in realizable(), b in realizable(), theta in 0.1f64..3.0, phi in -3.0f64..3.0) {
        let ctx = context(64, 1.0, 1.0, 0.0, [2e-27, 0.0]);
        let psi = SpinorState::gaussian(ctx.grid, 0.0, 1.0 / 16.0, theta, phi).unwrap().amps;
        let ra = realize(&a, &ctx).unwrap().dense();
        let rb = realize(&b, &ctx).unwrap().dense();
        let rc = realize(&a.commutator(&b), &ctx).unwrap().dense();
        let lhs = expect(&rc, &psi);
        let ab = &ra * &rb;
        let ba = &rb * &ra;
        let rhs = expect(&ab, &psi) - expect(&ba, &psi);
        let scale = (&ab * &psi).norm() * psi.norm() + (&ba * &psi).norm() * psi.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-6 * scale.max(1e-300), "{} vs {} ({})", lhs, rhs, scale);
    }
}
