//! Text syntax for expressions.
//!
//! Precedence, low to high: `+ -`; `* /` and juxtaposition (`3x^2 dx`);
//! unary minus; `^` (right-associative, exponent must reduce to a rational
//! constant); operands.
//!
//! Differentials: `dx`, `d2x`, `d^2x` are atoms of single-letter symbols.
//! A `d` followed by one letter is always read as an atom, so the product
//! of `d` and `x` cannot be written at all (`d` is not a valid symbol).
//! Multi-character symbols need the explicit form `d^1(name)`.
//! `d(u)` and `d^k(u)` of a symbol or atom are atoms; of anything else they
//! are a pending differential, accepted only by [`parse_with_differentials`].

mod format;
mod lexer;

use std::fmt;

use thiserror::Error;

pub use format::{format, format_latex, format_plain, Style};
use lexer::{Tok, Token};

use crate::canon::normalize;
use crate::expr::{DiffAtom, Expr, ExprError, Rational, Symbol};

/// Byte range into the parsed input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("unknown function `{name}` at {span}")]
    UnknownFunction { name: String, span: SourceSpan },
    #[error("exponent at {span} is not a rational constant")]
    NonRationalExponent { span: SourceSpan },
    #[error("invalid expression at {span}: {source}")]
    Invalid { source: ExprError, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnknownFunction { span, .. }
            | ParseError::NonRationalExponent { span }
            | ParseError::Invalid { span, .. } => *span,
        }
    }

    /// The input with a caret line under the offending span.
    pub fn render(&self, input: &str) -> String {
        let span = self.span();
        let width = input[span.start..span.end].chars().count().max(1);
        let pad = input[..span.start].chars().count();
        format!("{self}\n  {input}\n  {}{}", " ".repeat(pad), "^".repeat(width))
    }
}

/// Parses and normalizes an expression. `d(u)` with a composite `u` is an
/// error here.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let raw = Parser::new(text, false)?.parse_all()?;
    normalize(&raw).map_err(|source| ParseError::Invalid {
        source,
        span: SourceSpan::new(0, text.len()),
    })
}

/// Parses an expression that may contain `d(u)` of composite `u`.
///
/// The result is raw (not normalized) and may hold [`Expr::Pending`] nodes;
/// pass it to [`crate::differential::eliminate_pending`].
pub fn parse_with_differentials(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, true)?.parse_all()
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    allow_pending: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_pending: bool) -> Result<Self, ParseError> {
        Ok(Parser { src, tokens: lexer::tokenize(src)?, pos: 0, allow_pending })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.unexpected(&t, what))
        }
    }

    fn unexpected(&self, t: &Token, what: &str) -> ParseError {
        let found = if t.tok == Tok::Eof {
            "end of input".to_string()
        } else {
            format!("`{}`", &self.src[t.span.start..t.span.end])
        };
        ParseError::Syntax { message: format!("expected {what}, found {found}"), span: t.span }
    }

    fn parse_all(&mut self) -> Result<Expr, ParseError> {
        let e = self.parse_sum()?;
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            return Err(self.unexpected(&t, "an operator or end of input"));
        }
        Ok(e)
    }

    fn parse_sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.parse_product()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.parse_product()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(-self.parse_product()?);
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn parse_product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_unary()?;
        loop {
            let tok = self.peek().tok.clone();
            acc = match tok {
                Tok::Star => {
                    self.bump();
                    acc * self.parse_unary()?
                }
                Tok::Slash => {
                    self.bump();
                    acc / self.parse_unary()?
                }
                t if t.starts_operand() => acc * self.parse_unary()?,
                _ => return Ok(acc),
            };
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(-self.parse_unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.parse_unary()
            }
            _ => self.parse_power(),
        }
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_operand()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let start = self.peek().span.start;
        let exponent = self.parse_unary()?;
        let end = self.tokens[self.pos.saturating_sub(1)].span.end.max(start);
        let span = SourceSpan::new(start, end);
        match normalize(&exponent) {
            Ok(Expr::Const(r)) => Ok(base.pow(r)),
            _ => Err(ParseError::NonRationalExponent { span }),
        }
    }

    fn parse_operand(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => Symbol::new(&name)
                .map(Expr::Sym)
                .map_err(|source| ParseError::Invalid { source, span: t.span }),
            Tok::Atom { base, order } => {
                let sym = Symbol::new(&base).map_err(|source| ParseError::Invalid { source, span: t.span })?;
                let atom = DiffAtom::new(sym, order).map_err(|source| ParseError::Invalid { source, span: t.span })?;
                Ok(Expr::Atom(atom))
            }
            Tok::Func(f) => {
                let arg = self.parse_parenthesized()?;
                Ok(Expr::func(f, arg))
            }
            Tok::DiffOp { order } => {
                let (arg, span) = {
                    let start = t.span.start;
                    let arg = self.parse_parenthesized()?;
                    (arg, SourceSpan::new(start, self.tokens[self.pos.saturating_sub(1)].span.end))
                };
                self.differential_of(arg, order, span)
            }
            Tok::LParen => {
                let inner = self.parse_sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(&t, "an operand")),
        }
    }

    fn parse_parenthesized(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let inner = self.parse_sum()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(inner)
    }

    fn differential_of(&self, arg: Expr, order: u32, span: SourceSpan) -> Result<Expr, ParseError> {
        match arg {
            Expr::Sym(s) => Ok(Expr::Atom(DiffAtom::new(s, order).expect("order >= 1"))),
            Expr::Atom(a) => {
                let base = a.base().clone();
                Ok(Expr::Atom(DiffAtom::new(base, a.order() + order).expect("order >= 1")))
            }
            other if self.allow_pending => {
                let mut e = other;
                for _ in 0..order {
                    e = Expr::Pending(Box::new(e));
                }
                Ok(e)
            }
            _ => Err(ParseError::Syntax {
                message: "d(...) of an expression is only allowed where differentials are evaluated; \
                          use d^k(symbol) here"
                    .to_string(),
                span,
            }),
        }
    }
}

/// Parses a rational literal such as `-2/9`, `3` or `0.5`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    match parse(text)? {
        Expr::Const(c) => Ok(c),
        _ => Err(ParseError::Syntax {
            message: "expected a rational constant".to_string(),
            span: SourceSpan::new(0, text.len()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{integer, rational};

    fn p(s: &str) -> Expr {
        parse(s).unwrap_or_else(|e| panic!("{}", e.render(s)))
    }

    #[test]
    fn single_symbol() {
        assert_eq!(p("x"), Expr::var("x"));
    }

    #[test]
    fn juxtaposed_differential_term() {
        let expected = Expr::Product(vec![
            Expr::int(3),
            Expr::var("x").powi(2),
            Expr::diff_atom("x", 1),
        ]);
        assert_eq!(p("3x^2 dx"), expected);
        assert_eq!(p("3*x^2*dx"), expected);
        assert_eq!(p("3 x^2 d(x)"), expected);
    }

    #[test]
    fn second_derivative_expansion_text() {
        let e = p("d^2y/dx^2 - dy/dx * d^2x/dx^2");
        let dx = Expr::diff_atom("x", 1);
        let manual = Expr::diff_atom("y", 2) * dx.clone().powi(-2)
            - Expr::diff_atom("y", 1) * Expr::diff_atom("x", 2) * dx.powi(-3);
        assert_eq!(e, normalize(&manual).unwrap());
        assert_eq!(p("d2y/dx^2 - dy/dx d2x/dx^2"), e);
    }

    #[test]
    fn atom_powers_follow_leibniz_convention() {
        // dx^2 is (dx)^2, not d(x^2)
        assert_eq!(p("dx^2"), Expr::diff_atom("x", 1).powi(2));
        assert_eq!(p("d^2x^2"), Expr::diff_atom("x", 2).powi(2));
        assert_eq!(p("d(d(x))"), Expr::diff_atom("x", 2));
        assert_eq!(p("d^1(alpha)"), Expr::diff_atom("alpha", 1));
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x^2"), normalize(&-(Expr::var("x").powi(2))).unwrap());
        assert_eq!(p("2^3^2"), Expr::int(512));
        assert_eq!(p("x^-2"), Expr::var("x").powi(-2));
        assert_eq!(p("x^(1/3)"), Expr::var("x").pow(rational(1, 3)));
        assert_eq!(p("1/2 x"), Expr::Product(vec![Expr::Const(rational(1, 2)), Expr::var("x")]));
        assert_eq!(p("2 - x"), normalize(&(Expr::int(2) - Expr::var("x"))).unwrap());
        assert_eq!(p("x/y/z"), normalize(&(Expr::var("x") / Expr::var("y") / Expr::var("z"))).unwrap());
    }

    #[test]
    fn errors_carry_spans() {
        let cases = [
            ("x +", SourceSpan::new(3, 3)),
            ("(x", SourceSpan::new(2, 2)),
            ("x ^ y", SourceSpan::new(4, 5)),
            ("x $ y", SourceSpan::new(2, 3)),
            ("d(x^2)", SourceSpan::new(0, 6)),
            ("x )", SourceSpan::new(2, 3)),
        ];
        for (src, span) in cases {
            let err = parse(src).unwrap_err();
            assert_eq!(err.span(), span, "{src}: {err}");
            assert!(err.span().end <= src.len());
        }
        assert!(matches!(parse("x^y"), Err(ParseError::NonRationalExponent { .. })));
        assert!(matches!(parse("foo(x)"), Err(ParseError::UnknownFunction { .. })));
        assert!(matches!(parse("1/(x-x)"), Err(ParseError::Invalid { .. })));
    }

    #[test]
    fn pending_differentials() {
        let raw = parse_with_differentials("d(x^3) + d^2(x y)").unwrap();
        assert!(raw.contains_pending());
        assert_eq!(parse_with_differentials("d(x)").unwrap(), Expr::diff_atom("x", 1));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-2/9").unwrap(), rational(-2, 9));
        assert_eq!(parse_rational("1.5").unwrap(), rational(3, 2));
        assert_eq!(parse_rational("4").unwrap(), integer(4));
        assert!(parse_rational("x").is_err());
    }
}
