use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::scalar::{cq_i, cq_real, fmt_signed_terms, Bindings, ComplexRational, ScalarCoeff, Symbol};
use super::AlgebraError;

/// Spin factor of a monomial: identity or one Pauli matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn axis(k: usize) -> Pauli {
        Self::XYZ[k]
    }

    fn index(self) -> Option<usize> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(0),
            Pauli::Y => Some(1),
            Pauli::Z => Some(2),
        }
    }

    /// `σ_a σ_b = phase · σ_c` with phase in {1, i, -1, -i} encoded as a power of i.
    fn product(self, other: Pauli) -> (u8, Pauli) {
        match (self.index(), other.index()) {
            (None, _) => (0, other),
            (_, None) => (0, self),
            (Some(a), Some(b)) if a == b => (0, Pauli::I),
            (Some(a), Some(b)) => {
                let c = 3 - a - b;
                // right-handed: σ_x σ_y = i σ_z and cyclic
                if (a + 1) % 3 == b {
                    (1, Pauli::axis(c))
                } else {
                    (3, Pauli::axis(c))
                }
            }
        }
    }
}

/// The operator (non-scalar) part of a normal-ordered monomial:
/// `β^beta · x^x_exp · p^p_exp · σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GenPart {
    pub beta: bool,
    pub x: [u32; 3],
    pub p: [u32; 3],
    pub sigma: Pauli,
}

impl GenPart {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn beta() -> Self {
        Self { beta: true, ..Self::default() }
    }

    pub fn x(axis: usize) -> Self {
        let mut g = Self::default();
        g.x[axis] = 1;
        g
    }

    pub fn p(axis: usize) -> Self {
        let mut g = Self::default();
        g.p[axis] = 1;
        g
    }

    pub fn sigma(axis: usize) -> Self {
        Self { sigma: Pauli::axis(axis), ..Self::default() }
    }

    pub fn with_beta(mut self) -> Self {
        self.beta = true;
        self
    }

    pub fn with_x(mut self, axis: usize, n: u32) -> Self {
        self.x[axis] += n;
        self
    }

    pub fn with_p(mut self, axis: usize, n: u32) -> Self {
        self.p[axis] += n;
        self
    }

    pub fn with_sigma(mut self, axis: usize) -> Self {
        self.sigma = Pauli::axis(axis);
        self
    }

    pub fn has_sigma(&self) -> bool {
        self.sigma != Pauli::I
    }

    pub fn degree(&self) -> u32 {
        self.x.iter().chain(self.p.iter()).sum()
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

impl fmt::Display for GenPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.beta {
            parts.push("beta".into());
        }
        for (prefix, exps) in [("x", &self.x), ("p", &self.p)] {
            for (k, &n) in exps.iter().enumerate() {
                match n {
                    0 => {}
                    1 => parts.push(format!("{}_{}", prefix, AXES[k])),
                    _ => parts.push(format!("{}_{}^{}", prefix, AXES[k], n)),
                }
            }
        }
        if let Some(k) = self.sigma.index() {
            parts.push(format!("s_{}", AXES[k]));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}

/// A normal-ordered term: scalar coefficient times a generator part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: ScalarCoeff,
    pub gen: GenPart,
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Normal-orders `p^n x^k` on one axis:
/// `p^n x^k = Σ_j j! C(n,j) C(k,j) (-iħ)^j x^(k-j) p^(n-j)`.
/// Returns `(j, integer weight)` pairs; the caller supplies `(-iħ)^j`.
fn reorder_terms(n: u32, k: u32) -> Vec<(u32, BigInt)> {
    (0..=n.min(k))
        .map(|j| (j, factorial(j) * binomial(n, j) * binomial(k, j)))
        .collect()
}

fn minus_i_hbar_pow(j: u32) -> ScalarCoeff {
    // (-i)^j
    let phase = match j % 4 {
        0 => cq_real(BigRational::one()),
        1 => -cq_i(),
        2 => -cq_real(BigRational::one()),
        _ => cq_i(),
    };
    ScalarCoeff::monomial(phase, &[(Symbol::Hbar, j as i32)])
}

/// Product of two generator parts, returned in normal form.
fn mul_gen(a: &GenPart, b: &GenPart) -> Vec<(ScalarCoeff, GenPart)> {
    let (phase, sigma) = a.sigma.product(b.sigma);
    let pauli_phase = match phase {
        0 => ScalarCoeff::one(),
        1 => ScalarCoeff::i(),
        2 => ScalarCoeff::from_int(-1),
        _ => -&ScalarCoeff::i(),
    };
    let base = GenPart {
        beta: a.beta ^ b.beta,
        x: [0; 3],
        p: [0; 3],
        sigma,
    };
    let mut acc: Vec<(ScalarCoeff, GenPart)> = vec![(pauli_phase, base)];
    for axis in 0..3 {
        let terms = reorder_terms(a.p[axis], b.x[axis]);
        let mut next = Vec::with_capacity(acc.len() * terms.len());
        for (c, g) in &acc {
            for (j, w) in &terms {
                let mut g = *g;
                g.x[axis] = a.x[axis] + b.x[axis] - j;
                g.p[axis] = a.p[axis] + b.p[axis] - j;
                let weight = &ScalarCoeff::from_rational(BigRational::from_integer(w.clone()))
                    * &minus_i_hbar_pow(*j);
                next.push((c * &weight, g));
            }
        }
        acc = next;
    }
    acc
}

/// An exact operator polynomial in canonical normal form.
///
/// Monomials are keyed by their generator part, so no two share one, and
/// zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<GenPart, ScalarCoeff>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(ScalarCoeff::one())
    }

    pub fn scalar(s: ScalarCoeff) -> Self {
        Self::term(s, GenPart::identity())
    }

    pub fn symbol(sym: Symbol) -> Self {
        Self::scalar(ScalarCoeff::symbol(sym))
    }

    pub fn gen(g: GenPart) -> Self {
        Self::term(ScalarCoeff::one(), g)
    }

    pub fn term(coeff: ScalarCoeff, gen: GenPart) -> Self {
        let mut e = Self::zero();
        e.push(gen, coeff);
        e
    }

    pub fn beta() -> Self {
        Self::gen(GenPart::beta())
    }

    pub fn x(axis: usize) -> Self {
        Self::gen(GenPart::x(axis))
    }

    pub fn p(axis: usize) -> Self {
        Self::gen(GenPart::p(axis))
    }

    pub fn sigma(axis: usize) -> Self {
        Self::gen(GenPart::sigma(axis))
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut e = Self::zero();
        for m in iter {
            e.push(m.gen, m.coeff);
        }
        e
    }

    fn push(&mut self, gen: GenPart, coeff: ScalarCoeff) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(gen) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Monomials in canonical order.
    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(g, c)| Monomial { coeff: c.clone(), gen: *g })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GenPart, &ScalarCoeff)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.push(*g, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ScalarCoeff::from_int(-1))
    }

    pub fn scale(&self, s: &ScalarCoeff) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.push(*g, c * s);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&ScalarCoeff::from_int(n))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ga, ca) in &self.terms {
            for (gb, cb) in &other.terms {
                let c = ca * cb;
                for (w, g) in mul_gen(ga, gb) {
                    out.push(g, &c * &w);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Hermitian adjoint. Generators are self-adjoint and every scalar symbol
    /// is real, so only the rational parts are conjugated.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            // (c β x^A p^B σ)† = c* β σ p^B x^A; β and σ are central w.r.t. x, p
            let p_part = GenPart { p: g.p, ..GenPart::identity() };
            let x_part = GenPart { x: g.x, ..GenPart::identity() };
            let outer = GenPart { beta: g.beta, sigma: g.sigma, ..GenPart::identity() };
            let c = c.conj();
            for (w, reordered) in mul_gen(&p_part, &x_part) {
                let g2 = GenPart { beta: outer.beta, sigma: outer.sigma, ..reordered };
                out.push(g2, &c * &w);
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.adjoint() == self.neg()
    }

    /// Rewrites scalar symbols; generators are untouched.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Self, AlgebraError> {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.push(*g, c.substitute(bindings)?);
        }
        Ok(out)
    }

    /// Replaces β by `+1` (`positive = true`) or `-1`.
    pub fn project_beta(&self, positive: bool) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            let mut c = c.clone();
            if g.beta && !positive {
                c = -&c;
            }
            out.push(GenPart { beta: false, ..*g }, c);
        }
        out
    }

    /// Merged coefficient of `pattern`; zero when absent.
    pub fn coefficient_of(&self, pattern: &GenPart) -> ScalarCoeff {
        self.terms.get(pattern).cloned().unwrap_or_default()
    }

    /// Like [`coefficient_of`](Self::coefficient_of) but with the pattern
    /// given as an expression; it must be exactly one unit-coefficient monomial.
    pub fn coefficient_of_expr(&self, pattern: &OperatorExpr) -> Result<ScalarCoeff, AlgebraError> {
        match pattern.terms.iter().next() {
            Some((g, c)) if pattern.terms.len() == 1 && c.is_one() => Ok(self.coefficient_of(g)),
            _ => Err(AlgebraError::NonCanonicalPattern(pattern.to_string())),
        }
    }

    /// Keeps only the monomials satisfying `keep`.
    pub fn filter<F: FnMut(&GenPart) -> bool>(&self, mut keep: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| keep(g))
                .map(|(g, c)| (*g, c.clone()))
                .collect(),
        }
    }

    pub fn all_monomials_have_sigma(&self) -> bool {
        self.terms.keys().all(GenPart::has_sigma)
    }

    /// Scalar symbols referenced by any coefficient.
    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.terms.values().flat_map(|c| c.symbols().collect::<Vec<_>>()).collect()
    }

    /// If `self = q · other` for a constant `q`, returns it.
    pub fn proportionality(&self, other: &Self) -> Option<ComplexRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(cq_real(BigRational::from_integer(0.into())));
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut q: Option<ComplexRational> = None;
        for ((ga, ca), (gb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if ga != gb {
                return None;
            }
            let r = ca.proportionality(cb)?;
            match &q {
                None => q = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        q
    }

    /// Expression tree that normalizes back to `self`.
    pub fn to_tree(&self) -> Tree {
        Tree::Sum(
            self.terms
                .iter()
                .map(|(g, c)| {
                    let mut factors = vec![Tree::Scalar(c.clone())];
                    if g.beta {
                        factors.push(Tree::Gen(Generator::Beta));
                    }
                    for k in 0..3 {
                        for _ in 0..g.x[k] {
                            factors.push(Tree::Gen(Generator::X(k)));
                        }
                    }
                    for k in 0..3 {
                        for _ in 0..g.p[k] {
                            factors.push(Tree::Gen(Generator::P(k)));
                        }
                    }
                    if let Some(k) = g.sigma.index() {
                        factors.push(Tree::Gen(Generator::Sigma(k)));
                    }
                    Tree::Product(factors)
                })
                .collect(),
        )
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (g, c) in &self.terms {
            let gen_is_one = *g == GenPart::identity();
            let scalar_parts = c.signed_parts();
            if scalar_parts.len() == 1 {
                let (neg, body) = &scalar_parts[0];
                let body = match (body.as_str(), gen_is_one) {
                    ("1", false) => g.to_string(),
                    (_, true) => body.clone(),
                    _ => format!("{} * {}", body, g),
                };
                parts.push((*neg, body));
            } else {
                let inner = fmt_signed_terms(&scalar_parts);
                if gen_is_one {
                    parts.push((false, format!("({})", inner)));
                } else {
                    parts.push((false, format!("({}) * {}", inner, g)));
                }
            }
        }
        f.write_str(&fmt_signed_terms(&parts))
    }
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: Self) -> OperatorExpr {
        OperatorExpr::add(self, rhs)
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: Self) -> OperatorExpr {
        OperatorExpr::sub(self, rhs)
    }
}

impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: Self) -> OperatorExpr {
        OperatorExpr::mul(self, rhs)
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr::neg(self)
    }
}

/// Elementary operator symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Beta,
    X(usize),
    P(usize),
    Sigma(usize),
}

impl Generator {
    pub fn to_gen_part(self) -> GenPart {
        match self {
            Generator::Beta => GenPart::beta(),
            Generator::X(k) => GenPart::x(k),
            Generator::P(k) => GenPart::p(k),
            Generator::Sigma(k) => GenPart::sigma(k),
        }
    }
}

/// Unordered, unsimplified expression tree, as produced by the parser or
/// assembled by hand.
#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Gen(Generator),
    Scalar(ScalarCoeff),
    Sum(Vec<Tree>),
    Product(Vec<Tree>),
    Neg(Box<Tree>),
    Pow(Box<Tree>, i32),
}

/// Rewrites a tree into canonical normal form.
pub fn normalize(tree: &Tree) -> Result<OperatorExpr, AlgebraError> {
    Ok(match tree {
        Tree::Gen(g) => OperatorExpr::gen(g.to_gen_part()),
        Tree::Scalar(s) => OperatorExpr::scalar(s.clone()),
        Tree::Sum(items) => {
            let mut acc = OperatorExpr::zero();
            for t in items {
                acc = acc.add(&normalize(t)?);
            }
            acc
        }
        Tree::Product(items) => {
            let mut acc = OperatorExpr::one();
            for t in items {
                acc = acc.mul(&normalize(t)?);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Tree::Neg(inner) => normalize(inner)?.neg(),
        Tree::Pow(base, exp) => {
            let base = normalize(base)?;
            if *exp >= 0 {
                base.pow(*exp as u32)
            } else {
                let scalar = match base.terms.iter().next() {
                    None => ScalarCoeff::zero(),
                    Some((g, c)) if base.terms.len() == 1 && *g == GenPart::identity() => c.clone(),
                    _ => return Err(AlgebraError::NegativeOperatorPower(base.to_string())),
                };
                OperatorExpr::scalar(scalar.pow(*exp)?)
            }
        }
    })
}
