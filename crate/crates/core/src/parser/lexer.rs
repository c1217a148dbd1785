use num_bigint::BigInt;
use num_traits::Zero;

use super::{ParseError, SourceSpan};
use crate::expr::{Func, Rational};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    /// `dx`, `d2x`, `d^2x`: differential shorthand of a single-letter symbol.
    Atom { base: String, order: u32 },
    /// `d` or `d^k` directly followed by `(`; the parenthesis is not consumed.
    DiffOp { order: u32 },
    /// Function name directly followed by `(`; the parenthesis is not consumed.
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    /// Tokens that can start an operand, and so trigger juxtaposition.
    pub(crate) fn starts_operand(&self) -> bool {
        matches!(
            self,
            Tok::Num(_) | Tok::Ident(_) | Tok::Atom { .. } | Tok::DiffOp { .. } | Tok::Func(_) | Tok::LParen
        )
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token { tok, span: SourceSpan::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (value, end) = lex_number(src, i);
            i = end;
            out.push(Token { tok: Tok::Num(value), span: SourceSpan::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let end = ident_end(bytes, i);
            let word = &src[i..end];
            i = end;
            let tok = classify_word(src, word, start, &mut i)?;
            out.push(Token { tok, span: SourceSpan::new(start, i) });
            continue;
        }
        // Report the whole (possibly multi-byte) character.
        let width = src[i..].chars().next().map_or(1, char::len_utf8);
        return Err(ParseError::Syntax {
            message: format!("unexpected character `{}`", &src[i..i + width]),
            span: SourceSpan::new(i, i + width),
        });
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan::new(src.len(), src.len()) });
    Ok(out)
}

fn ident_end(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
    }
    i
}

fn lex_number(src: &str, start: usize) -> (Rational, usize) {
    let bytes = src.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let int_part = &src[start..i];
    let mut frac_part = "";
    if i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
        let f0 = i + 1;
        i = f0;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        frac_part = &src[f0..i];
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    let denom = num_traits::Pow::pow(BigInt::from(10u32), frac_part.len() as u32);
    let value = if frac_part.is_empty() { Rational::from_integer(numer) } else { Rational::new(numer, denom) };
    (value, i)
}

fn classify_word(src: &str, word: &str, start: usize, pos: &mut usize) -> Result<Tok, ParseError> {
    let bytes = src.as_bytes();
    let next = bytes.get(*pos).copied();

    if word == "d" {
        return lex_bare_d(src, start, pos);
    }
    if let Some(rest) = word.strip_prefix('d') {
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        let tail = &rest[digits..];
        if tail.len() == 1 && tail.chars().all(|c| c.is_ascii_alphabetic()) {
            let order = if digits == 0 {
                1
            } else {
                parse_order(&rest[..digits], SourceSpan::new(start, *pos))?
            };
            return Ok(Tok::Atom { base: tail.to_string(), order });
        }
    }
    if let Some(f) = Func::from_name(word) {
        if next == Some(b'(') {
            return Ok(Tok::Func(f));
        }
        return Err(ParseError::Syntax {
            message: format!("function `{word}` must be followed by `(`"),
            span: SourceSpan::new(start, *pos),
        });
    }
    if next == Some(b'(') && word.len() > 1 {
        return Err(ParseError::UnknownFunction {
            name: word.to_string(),
            span: SourceSpan::new(start, *pos),
        });
    }
    Ok(Tok::Ident(word.to_string()))
}

/// Handles a lone `d`: `d(`, `d^k(`, or `d^k` + single letter.
fn lex_bare_d(src: &str, start: usize, pos: &mut usize) -> Result<Tok, ParseError> {
    let bytes = src.as_bytes();
    match bytes.get(*pos) {
        Some(b'(') => return Ok(Tok::DiffOp { order: 1 }),
        Some(b'^') => {
            let d0 = *pos + 1;
            let mut j = d0;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > d0 {
                let order = parse_order(&src[d0..j], SourceSpan::new(start, j))?;
                match bytes.get(j) {
                    Some(b'(') => {
                        *pos = j;
                        return Ok(Tok::DiffOp { order });
                    }
                    Some(c) if c.is_ascii_alphabetic() => {
                        let end = ident_end(bytes, j);
                        if end - j != 1 {
                            return Err(ParseError::Syntax {
                                message: format!(
                                    "differential shorthand needs a single-letter symbol; write d^{order}({})",
                                    &src[j..end]
                                ),
                                span: SourceSpan::new(start, end),
                            });
                        }
                        *pos = end;
                        return Ok(Tok::Atom { base: src[j..end].to_string(), order });
                    }
                    _ => {}
                }
            }
        }
        _ => {}
    }
    Err(ParseError::Syntax {
        message: "bare `d`: write d(expr), dx or d^k(x)".to_string(),
        span: SourceSpan::new(start, start + 1),
    })
}

fn parse_order(digits: &str, span: SourceSpan) -> Result<u32, ParseError> {
    match digits.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(ParseError::Syntax {
            message: format!("differential order `{digits}` must be a positive integer"),
            span,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn differential_shorthands() {
        let atom = |b: &str, order| Tok::Atom { base: b.to_string(), order };
        assert_eq!(toks("dx"), [atom("x", 1), Tok::Eof]);
        assert_eq!(toks("d2x"), [atom("x", 2), Tok::Eof]);
        assert_eq!(toks("d^2y"), [atom("y", 2), Tok::Eof]);
        assert_eq!(toks("d^2(x)")[0], Tok::DiffOp { order: 2 });
        assert_eq!(toks("d(x)")[0], Tok::DiffOp { order: 1 });
        assert_eq!(toks("dxy"), [Tok::Ident("dxy".into()), Tok::Eof]);
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(toks("0.25")[0], Tok::Num(Rational::new(1.into(), 4.into())));
        assert_eq!(toks("3x")[..2], [Tok::Num(Rational::from_integer(3.into())), Tok::Ident("x".into())]);
        assert!(matches!(toks("1")[0], Tok::Num(ref v) if v.is_one()));
    }

    #[test]
    fn lone_d_errors_carry_spans() {
        let err = tokenize("x + d").unwrap_err();
        assert_eq!(err.span(), SourceSpan::new(4, 5));
        let err = tokenize("d^2xy").unwrap_err();
        assert_eq!(err.span(), SourceSpan::new(0, 5));
        let err = tokenize("d0x").unwrap_err();
        assert_eq!(err.span(), SourceSpan::new(0, 3));
    }

    #[test]
    fn unknown_function() {
        assert!(matches!(tokenize("tan(x)"), Err(ParseError::UnknownFunction { .. })));
        assert_eq!(toks("x(y)")[..2], [Tok::Ident("x".into()), Tok::LParen]);
    }
}
