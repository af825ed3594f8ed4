//! Three-vectors of operator expressions. Products keep the left factor on
//! the left, so `dot` and `cross` are safe for noncommuting components.

use super::{OperatorExpr, ScalarCoeff, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpVec(pub [OperatorExpr; 3]);

impl OpVec {
    pub fn x() -> Self {
        Self([0, 1, 2].map(OperatorExpr::x))
    }

    pub fn p() -> Self {
        Self([0, 1, 2].map(OperatorExpr::p))
    }

    pub fn sigma() -> Self {
        Self([0, 1, 2].map(OperatorExpr::sigma))
    }

    pub fn from_symbols(syms: [Symbol; 3]) -> Self {
        Self(syms.map(OperatorExpr::symbol))
    }

    /// `(0, 0, s)`.
    pub fn along_z(sym: Symbol) -> Self {
        Self([OperatorExpr::zero(), OperatorExpr::zero(), OperatorExpr::symbol(sym)])
    }

    pub fn dot(&self, other: &Self) -> OperatorExpr {
        (0..3).fold(OperatorExpr::zero(), |acc, k| acc.add(&self.0[k].mul(&other.0[k])))
    }

    /// `(A × B)_i = ε_ijk A_j B_k`.
    pub fn cross(&self, other: &Self) -> Self {
        let c = |j: usize, k: usize| self.0[j].mul(&other.0[k]).sub(&self.0[k].mul(&other.0[j]));
        Self([c(1, 2), c(2, 0), c(0, 1)])
    }

    pub fn scale(&self, s: &ScalarCoeff) -> Self {
        Self(self.0.clone().map(|e| e.scale(s)))
    }

    pub fn map<F: FnMut(&OperatorExpr) -> OperatorExpr>(&self, f: F) -> Self {
        Self(self.0.each_ref().map(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_z_component() {
        let l = OpVec::x().cross(&OpVec::p());
        let expected = OperatorExpr::x(0).mul(&OperatorExpr::p(1)).sub(&OperatorExpr::x(1).mul(&OperatorExpr::p(0)));
        assert_eq!(l.0[2], expected);
        // reordering x_y p_x as p_x x_y changes nothing: different axes commute
        let reordered = OperatorExpr::x(0).mul(&OperatorExpr::p(1)).sub(&OperatorExpr::p(0).mul(&OperatorExpr::x(1)));
        assert_eq!(l.0[2], reordered);
    }

    #[test]
    fn p_squared() {
        let p2 = OpVec::p().dot(&OpVec::p());
        assert_eq!(p2.len(), 3);
    }
}
