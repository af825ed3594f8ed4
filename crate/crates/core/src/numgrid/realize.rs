use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Grid1D, NumError, RealizationContext, Units};
use crate::opalg::{OperatorExpr, Pauli};

const HERMITIAN_TOL: f64 = 1e-10;

/// Dense matrix on spin ⊗ grid in scaled units. Index `s·N + j` holds spin
/// `s ∈ {↑, ↓}` at grid point `j`. Pure multiples of the identity are kept
/// in `offset` rather than on the diagonal, so large constant terms such as
/// `βmc²` do not swamp the rest of the spectrum.
#[derive(Debug, Clone)]
pub struct MatrixOp {
    pub matrix: DMatrix<Complex64>,
    pub offset: Complex64,
    pub hermitian: bool,
    pub units: Units,
    pub grid: Grid1D,
}

impl MatrixOp {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The full matrix including the identity offset.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let mut m = self.matrix.clone();
        for k in 0..m.nrows() {
            m[(k, k)] += self.offset;
        }
        m
    }

    /// `max |M − M†| / max |M|` of the full matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.dense();
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let diff = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        diff / scale
    }
}

fn pauli_block(p: Pauli) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

/// Spectral `p_z = −i d/dz` on the periodic grid, in scaled units. The
/// Nyquist mode is dropped so the matrix is exactly Hermitian.
pub(crate) fn momentum_matrix(grid: &Grid1D, units: &Units) -> DMatrix<Complex64> {
    let n = grid.n_points();
    let length = units.length_to_scaled(grid.length_cm());
    let half = n as i64 / 2;
    // row kernel depends only on (j − l) mod n
    let kernel: Vec<Complex64> = (0..n)
        .map(|d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (-half + 1)..half {
                let k = 2.0 * std::f64::consts::PI * m as f64 / length;
                let phase = 2.0 * std::f64::consts::PI * (m * d as i64) as f64 / n as f64;
                acc += Complex64::from_polar(k, phase);
            }
            acc / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |j, l| kernel[(j + n - l) % n])
}

/// Maps an expression to a matrix. Transverse-position factors are zero
/// (such monomials are dropped with a warning) and `β = +1`.
pub fn realize(expr: &OperatorExpr, ctx: &RealizationContext) -> Result<MatrixOp, NumError> {
    let unbound: Vec<String> = expr
        .symbols()
        .into_iter()
        .filter(|s| ctx.params.value(*s).is_none())
        .map(|s| s.name().to_string())
        .collect();
    if !unbound.is_empty() {
        return Err(NumError::Unbound(unbound));
    }

    let n = ctx.grid.n_points();
    let units = ctx.units;
    let z: Vec<f64> = ctx.grid.coordinates().iter().map(|&v| units.length_to_scaled(v)).collect();
    let p_matrix = momentum_matrix(&ctx.grid, &units);
    let p_perp = [units.momentum_to_scaled(ctx.p_perp[0]), units.momentum_to_scaled(ctx.p_perp[1])];

    let mut p_powers: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(n, n)];
    let mut total = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    let mut offset = Complex64::new(0.0, 0.0);
    let mut dropped = 0usize;

    for (gen, coeff) in expr.iter() {
        if gen.x[0] > 0 || gen.x[1] > 0 {
            dropped += 1;
            continue;
        }
        let mut c = coeff.eval(|s| ctx.scaled_symbol(s))?;
        c *= p_perp[0].powi(gen.p[0] as i32) * p_perp[1].powi(gen.p[1] as i32);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (xz, pz) = (gen.x[2], gen.p[2] as usize);
        if xz == 0 && pz == 0 && gen.sigma == Pauli::I {
            offset += c;
            continue;
        }
        while p_powers.len() <= pz {
            let next = p_powers.last().unwrap() * &p_matrix;
            p_powers.push(next);
        }
        let mut orbital = p_powers[pz].clone();
        if xz > 0 {
            for (j, mut row) in orbital.row_iter_mut().enumerate() {
                row *= Complex64::new(z[j].powi(xz as i32), 0.0);
            }
        }
        let block = pauli_block(gen.sigma);
        for (s, brow) in block.iter().enumerate() {
            for (t, &b) in brow.iter().enumerate() {
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let factor = b * c;
                let mut view = total.view_mut((s * n, t * n), (n, n));
                view += &orbital * factor;
            }
        }
    }
    if dropped > 0 {
        warn!("dropped {} monomial(s) with transverse position factors (pinned to x = y = 0)", dropped);
    }

    let hermitian = expr.is_hermitian();
    if hermitian {
        // symbolically self-adjoint: use the symmetric realization
        let adj = total.adjoint();
        total = (&total + adj) * Complex64::new(0.5, 0.0);
        offset = Complex64::new(offset.re, 0.0);
    }
    let op = MatrixOp { matrix: total, offset, hermitian, units, grid: ctx.grid };
    if hermitian {
        debug_assert!(op.hermiticity_defect() <= HERMITIAN_TOL);
    }
    Ok(op)
}
