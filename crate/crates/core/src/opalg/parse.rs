//! Text syntax for operator expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INT)?
//! atom   := INT | INT '/' INT | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers are the generators `x_x x_y x_z p_x p_y p_z s_x s_y s_z beta`,
//! the scalars `hbar c m mu_a a_x a_y a_z g_x g_y g_z Phi` and the imaginary
//! unit `i`. Only scalar bases may carry a negative exponent.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::expr::{normalize, Generator, OperatorExpr, Tree};
use super::scalar::{ScalarCoeff, Symbol};
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

pub(crate) fn generator_from_name(name: &str) -> Option<Generator> {
    let axis = |c: &str| match c {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => None,
    };
    if name == "beta" {
        return Some(Generator::Beta);
    }
    let (head, tail) = name.split_once('_')?;
    let k = axis(tail)?;
    match head {
        "x" => Some(Generator::X(k)),
        "p" => Some(Generator::P(k)),
        "s" => Some(Generator::Sigma(k)),
        _ => None,
    }
}

pub(crate) fn is_generator_name(name: &str) -> bool {
    generator_from_name(name).is_some()
}

pub(crate) fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '^' => out.push((start, Token::Caret)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            c if c.is_ascii_digit() => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let q = parse_rational(&text).ok_or_else(|| AlgebraError::Parse {
                    pos: start,
                    msg: format!("bad numeric literal `{}`", text),
                })?;
                out.push((start, Token::Num(q)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push((start, Token::Ident(text)));
                continue;
            }
            other => {
                let mut j = i + 1;
                while j < chars.len() && !chars[j].is_whitespace() {
                    j += 1;
                }
                let _ = other;
                return Err(AlgebraError::UnknownToken(chars[start..j].iter().collect()));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Tree, AlgebraError> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    items.push(Tree::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Tree::Sum(items) })
    }

    fn term(&mut self) -> Result<Tree, AlgebraError> {
        let mut items = vec![self.unary()?];
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Tree::Product(items) })
    }

    fn unary(&mut self) -> Result<Tree, AlgebraError> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Tree::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Tree, AlgebraError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let negative = if let Some(Token::Minus) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let exp = match self.peek() {
                Some(Token::Num(q)) if q.is_integer() => {
                    let n: i32 = q
                        .numer()
                        .try_into()
                        .map_err(|_| AlgebraError::Parse { pos: self.offset(), msg: "exponent too large".into() })?;
                    n
                }
                _ => return self.err("expected integer exponent"),
            };
            self.pos += 1;
            return Ok(Tree::Pow(Box::new(base), if negative { -exp } else { exp }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Tree, AlgebraError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Token::Num(q) => Ok(Tree::Scalar(ScalarCoeff::from_rational(q))),
            Token::Ident(name) => {
                if name == "i" {
                    Ok(Tree::Scalar(ScalarCoeff::i()))
                } else if let Some(g) = generator_from_name(&name) {
                    Ok(Tree::Gen(g))
                } else if let Some(s) = Symbol::from_name(&name) {
                    Ok(Tree::Scalar(ScalarCoeff::symbol(s)))
                } else {
                    Err(AlgebraError::UnknownToken(name))
                }
            }
            Token::LParen => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            other => {
                self.pos -= 1;
                self.err(format!("unexpected token {:?}", other))
            }
        }
    }
}

/// Parses source text into an unnormalized tree.
pub fn parse_tree(src: &str) -> Result<Tree, AlgebraError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, end: src.len() };
    let tree = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.err("trailing input");
    }
    Ok(tree)
}

/// Parses and normalizes.
pub fn parse(src: &str) -> Result<OperatorExpr, AlgebraError> {
    normalize(&parse_tree(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::GenPart;

    #[test]
    fn parses_commutation_example() {
        let e = parse("p_z * x_z").unwrap();
        assert_eq!(e, parse("x_z * p_z - i * hbar").unwrap());
    }

    #[test]
    fn caret_binds_tightest() {
        assert_eq!(parse("2 * x_z ^ 2").unwrap(), parse("2 * (x_z * x_z)").unwrap());
        assert_eq!(parse("- x_z ^ 2").unwrap(), parse("-1 * x_z * x_z").unwrap());
    }

    #[test]
    fn rational_literals_and_negative_scalar_powers() {
        let e = parse("3/4 * hbar * c ^ -2").unwrap();
        let (g, c) = e.iter().next().unwrap();
        assert_eq!(*g, GenPart::identity());
        assert_eq!(c.to_string(), "3/4 * hbar * c^-2");
    }

    #[test]
    fn unknown_token_is_reported() {
        match parse("x_z * q_w") {
            Err(AlgebraError::UnknownToken(t)) => assert_eq!(t, "q_w"),
            other => panic!("unexpected {:?}", other),
        }
        assert!(matches!(parse("x_z $ p_z"), Err(AlgebraError::UnknownToken(t)) if t == "$"));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse("(x_z"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(parse("x_z p_z"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(parse("1/0"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(parse("x_z ^ -1"), Err(AlgebraError::NegativeOperatorPower(_))));
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "0",
            "beta * m * c^2 + 1/2 * beta * m^-1 * p_z^2",
            "(1 + mu_a) * hbar * s_x * p_y",
            "(2/3 - 1/5 * i) * x_x * p_y * s_z - i * beta",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{}", e);
        }
    }
}
