//! Exact scalar coefficients: Laurent polynomials in the physical symbols with
//! complex-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Exact complex rational `re + i·im`.
pub type ComplexRational = Complex<BigRational>;

/// Scalar symbols. All of them are real and commute with everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Hbar,
    C,
    M,
    MuA,
    Ax,
    Ay,
    Az,
    Gx,
    Gy,
    Gz,
    Phi,
}

impl Symbol {
    pub const ALL: [Symbol; 11] = [
        Symbol::Hbar,
        Symbol::C,
        Symbol::M,
        Symbol::MuA,
        Symbol::Ax,
        Symbol::Ay,
        Symbol::Az,
        Symbol::Gx,
        Symbol::Gy,
        Symbol::Gz,
        Symbol::Phi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Hbar => "hbar",
            Symbol::C => "c",
            Symbol::M => "m",
            Symbol::MuA => "mu_a",
            Symbol::Ax => "a_x",
            Symbol::Ay => "a_y",
            Symbol::Az => "a_z",
            Symbol::Gx => "g_x",
            Symbol::Gy => "g_y",
            Symbol::Gz => "g_z",
            Symbol::Phi => "Phi",
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        Symbol::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// Components of the acceleration vector **a**.
    pub fn accel() -> [Symbol; 3] {
        [Symbol::Ax, Symbol::Ay, Symbol::Az]
    }

    /// Components of the gravity vector **g**.
    pub fn gravity() -> [Symbol; 3] {
        [Symbol::Gx, Symbol::Gy, Symbol::Gz]
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Product of symbols with nonzero integer exponents.
pub type SymbolPowers = BTreeMap<Symbol, i32>;

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn cq_real(q: BigRational) -> ComplexRational {
    Complex::new(q, BigRational::zero())
}

pub(crate) fn cq_i() -> ComplexRational {
    Complex::new(BigRational::zero(), BigRational::one())
}

fn cq_is_zero(c: &ComplexRational) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

fn cq_pow(c: &ComplexRational, exp: i32) -> Option<ComplexRational> {
    let mut base = c.clone();
    if exp < 0 {
        if cq_is_zero(c) {
            return None;
        }
        base = cq_real(BigRational::one()) / base;
    }
    let mut out = cq_real(BigRational::one());
    for _ in 0..exp.unsigned_abs() {
        out *= base.clone();
    }
    Some(out)
}

/// An exact scalar: a finite sum of `(complex rational) × Π symbol^k` terms.
///
/// Terms with zero coefficient are never stored and symbol exponent maps
/// never contain a zero exponent, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ScalarCoeff {
    terms: BTreeMap<SymbolPowers, ComplexRational>,
}

impl ScalarCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_complex(cq_real(BigRational::one()))
    }

    pub fn i() -> Self {
        Self::from_complex(cq_i())
    }

    pub fn from_complex(c: ComplexRational) -> Self {
        let mut s = Self::zero();
        s.insert(SymbolPowers::new(), c);
        s
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_complex(cq_real(q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rational(n, d))
    }

    pub fn symbol(sym: Symbol) -> Self {
        Self::symbol_pow(sym, 1)
    }

    pub fn symbol_pow(sym: Symbol, exp: i32) -> Self {
        let mut powers = SymbolPowers::new();
        if exp != 0 {
            powers.insert(sym, exp);
        }
        let mut s = Self::zero();
        s.insert(powers, cq_real(BigRational::one()));
        s
    }

    /// Single-term scalar `c · Π symbol^k`.
    pub fn monomial(c: ComplexRational, powers: &[(Symbol, i32)]) -> Self {
        let mut map = SymbolPowers::new();
        for &(s, k) in powers {
            *map.entry(s).or_insert(0) += k;
        }
        map.retain(|_, k| *k != 0);
        let mut out = Self::zero();
        out.insert(map, c);
        out
    }

    fn insert(&mut self, powers: SymbolPowers, c: ComplexRational) {
        if cq_is_zero(&c) {
            return;
        }
        match self.terms.entry(powers) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if cq_is_zero(&sum) {
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

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolPowers, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value as a plain complex rational, if no symbols are involved.
    pub fn as_constant(&self) -> Option<ComplexRational> {
        match self.terms.len() {
            0 => Some(cq_real(BigRational::zero())),
            1 => {
                let (p, c) = self.terms.iter().next().unwrap();
                p.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The value as a real rational, if constant and real.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_constant()
            .and_then(|c| c.im.is_zero().then_some(c.re))
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (p, c) in &self.terms {
            out.insert(p.clone(), c.conj());
        }
        out
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero();
        for (p, v) in &self.terms {
            out.insert(p.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Integer power; negative powers require a single-term scalar.
    pub fn pow(&self, exp: i32) -> Result<Self, AlgebraError> {
        if exp >= 0 {
            let mut out = Self::one();
            for _ in 0..exp {
                out = &out * self;
            }
            return Ok(out);
        }
        if self.terms.len() != 1 {
            return Err(AlgebraError::NotInvertible(self.to_string()));
        }
        let (p, c) = self.terms.iter().next().unwrap();
        let c = cq_pow(c, exp).ok_or_else(|| AlgebraError::NotInvertible(self.to_string()))?;
        let powers: SymbolPowers = p.iter().map(|(s, k)| (*s, k * exp)).collect();
        let mut out = Self::zero();
        out.insert(powers, c);
        Ok(out)
    }

    /// If `self = q · other` for a constant complex rational `q`, returns `q`.
    pub fn proportionality(&self, other: &ScalarCoeff) -> Option<ComplexRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(cq_real(BigRational::zero()));
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut q: Option<ComplexRational> = None;
        for ((pa, ca), (pb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if pa != pb {
                return None;
            }
            let r = ca.clone() / cb.clone();
            match &q {
                None => q = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        q
    }

    /// Replace symbols according to `bindings`; unbound symbols are kept.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Self, AlgebraError> {
        let mut out = Self::zero();
        for (powers, c) in &self.terms {
            let mut term = Self::from_complex(c.clone());
            for (&sym, &k) in powers {
                let factor = match bindings.get(sym) {
                    Some(b) => b.as_scalar().pow(k)?,
                    None => Self::symbol_pow(sym, k),
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Symbols appearing anywhere in this scalar.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.terms.keys().flat_map(|p| p.keys().copied())
    }

    /// Numeric value given a lookup for every symbol that occurs.
    pub fn eval<F>(&self, mut value: F) -> Result<Complex64, AlgebraError>
    where
        F: FnMut(Symbol) -> Option<f64>,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for (powers, c) in &self.terms {
            let mut v = Complex64::new(
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            );
            for (&sym, &k) in powers {
                let x = value(sym).ok_or_else(|| AlgebraError::Unbound(vec![sym.name().into()]))?;
                v *= x.powi(k);
            }
            total += v;
        }
        Ok(total)
    }
}

impl<'a> Add for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn add(self, rhs: &'a ScalarCoeff) -> ScalarCoeff {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.insert(p.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn sub(self, rhs: &'a ScalarCoeff) -> ScalarCoeff {
        self + &(-rhs)
    }
}

impl Neg for &ScalarCoeff {
    type Output = ScalarCoeff;
    fn neg(self) -> ScalarCoeff {
        let mut out = ScalarCoeff::zero();
        for (p, c) in &self.terms {
            out.insert(p.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn mul(self, rhs: &'a ScalarCoeff) -> ScalarCoeff {
        let mut out = ScalarCoeff::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let mut p = pa.clone();
                for (s, k) in pb {
                    *p.entry(*s).or_insert(0) += k;
                }
                p.retain(|_, k| *k != 0);
                out.insert(p, ca.clone() * cb.clone());
            }
        }
        out
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders one term without its sign. Returns `(negative, body)`.
fn fmt_term(powers: &SymbolPowers, c: &ComplexRational) -> (bool, String) {
    let mut factors: Vec<String> = Vec::new();
    let negative;
    if c.im.is_zero() {
        negative = c.re.is_negative();
        let mag = c.re.abs();
        if !mag.is_one() || powers.is_empty() {
            factors.push(fmt_rational(&mag));
        }
    } else if c.re.is_zero() {
        negative = c.im.is_negative();
        let mag = c.im.abs();
        if !mag.is_one() {
            factors.push(fmt_rational(&mag));
        }
        factors.push("i".into());
    } else {
        negative = false;
        let sign = if c.im.is_negative() { "-" } else { "+" };
        let re = if c.re.is_negative() {
            format!("-{}", fmt_rational(&c.re.abs()))
        } else {
            fmt_rational(&c.re)
        };
        factors.push(format!("({} {} {} * i)", re, sign, fmt_rational(&c.im.abs())));
    }
    for (s, k) in powers {
        if *k == 1 {
            factors.push(s.name().to_string());
        } else {
            factors.push(format!("{}^{}", s.name(), k));
        }
    }
    (negative, factors.join(" * "))
}

pub(crate) fn fmt_signed_terms(parts: &[(bool, String)]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (neg, body)) in parts.iter().enumerate() {
        match (idx, neg) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(body);
    }
    out
}

impl ScalarCoeff {
    pub(crate) fn signed_parts(&self) -> Vec<(bool, String)> {
        self.terms.iter().map(|(p, c)| fmt_term(p, c)).collect()
    }
}

impl fmt::Display for ScalarCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_signed_terms(&self.signed_parts()))
    }
}

/// Right-hand side of a scalar substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Rational(BigRational),
    Symbol { negate: bool, symbol: Symbol },
}

impl Binding {
    pub fn as_scalar(&self) -> ScalarCoeff {
        match self {
            Binding::Rational(q) => ScalarCoeff::from_rational(q.clone()),
            Binding::Symbol { negate, symbol } => {
                let s = ScalarCoeff::symbol(*symbol);
                if *negate {
                    -&s
                } else {
                    s
                }
            }
        }
    }
}

/// A set of scalar-symbol substitutions.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    map: BTreeMap<Symbol, Binding>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, sym: Symbol, value: Binding) -> Self {
        self.map.insert(sym, value);
        self
    }

    pub fn rational(self, sym: Symbol, q: BigRational) -> Self {
        self.bind(sym, Binding::Rational(q))
    }

    pub fn symbol(self, sym: Symbol, negate: bool, target: Symbol) -> Self {
        self.bind(sym, Binding::Symbol { negate, symbol: target })
    }

    /// The `a = -g` substitution, component-wise.
    pub fn accel_to_minus_gravity() -> Self {
        let mut b = Self::new();
        for (a, g) in Symbol::accel().into_iter().zip(Symbol::gravity()) {
            b = b.symbol(a, true, g);
        }
        b
    }

    /// Parses `name -> value` pairs such as `("a_z", "-g_z")` or `("mu_a", "-3")`.
    pub fn insert_named(&mut self, name: &str, value: &str) -> Result<(), AlgebraError> {
        let name = name.trim();
        if super::parse::is_generator_name(name) {
            return Err(AlgebraError::BindingGenerator(name.into()));
        }
        let sym = Symbol::from_name(name).ok_or_else(|| AlgebraError::UnknownToken(name.into()))?;
        let value = value.trim();
        let (negate, body) = match value.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, value),
        };
        if super::parse::is_generator_name(body) {
            return Err(AlgebraError::BindingGenerator(body.into()));
        }
        let binding = if let Some(target) = Symbol::from_name(body) {
            Binding::Symbol { negate, symbol: target }
        } else {
            let q = super::parse::parse_rational(body)
                .ok_or_else(|| AlgebraError::UnknownToken(body.into()))?;
            Binding::Rational(if negate { -q } else { q })
        };
        self.map.insert(sym, binding);
        Ok(())
    }

    pub fn get(&self, sym: Symbol) -> Option<&Binding> {
        self.map.get(&sym)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
