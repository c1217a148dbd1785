//! Plain-text and LaTeX rendering.
//!
//! Plain layout rules (the output re-parses to an equal expression):
//! - sum terms keep canonical order, joined by ` + ` / ` - `;
//! - a term is `coefficient numerator-factors /den1 /den2 ...`, factors
//!   juxtaposed with single spaces (`3x^2 dx`, `2 dx dy`); an integer
//!   coefficient is glued to a leading symbol factor (`3x^2`, `6x dx^2`);
//! - a term whose only denominator is a power `dv^N` of one first
//!   differential, and whose numerator is made of differential atoms of
//!   total weight `N` (order times multiplicity), is laid out as a product
//!   of derivative-like ratios ordered by (differential order, base):
//!   `dy/dx*d^2x/dx^2`, `3*dy/dx*d^2x^2/dx^4`;
//! - `dx^2` means `(dx)^2`, so atom powers need no parentheses.

use num_traits::{One, Signed, Zero};

use crate::expr::{DiffAtom, Expr, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Plain,
    Latex,
}

pub fn format(e: &Expr, style: Style) -> String {
    match style {
        Style::Plain => format_plain(e),
        Style::Latex => format_latex(e),
    }
}

pub fn format_plain(e: &Expr) -> String {
    render_sum(e, &Plain)
}

pub fn format_latex(e: &Expr) -> String {
    render_sum(e, &Latex)
}

/// A term split for layout: sign, |coefficient|, numerator and denominator
/// factors as (base, positive exponent).
struct TermParts<'a> {
    negative: bool,
    coeff: Rational,
    num: Vec<(&'a Expr, Rational)>,
    den: Vec<(&'a Expr, Rational)>,
}

/// One ratio `atom^m / dv^(order*m)` of the grouped layout.
struct Ratio<'a> {
    atom: &'a DiffAtom,
    power: Rational,
    over: &'a Expr,
    over_power: Rational,
}

fn split_term(factors: &[Expr], coeff: Rational) -> TermParts<'_> {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in factors {
        let (b, r) = f.as_power();
        if r.is_negative() {
            den.push((b, -r));
        } else {
            num.push((b, r));
        }
    }
    // Differentials trail the ordinary factors: `y d^2x`, `cos(q) dq`.
    num.sort_by_key(|(b, _)| matches!(b, Expr::Atom(_)));
    TermParts { negative: coeff.is_negative(), coeff: coeff.abs(), num, den }
}

/// Returns the grouped-ratio layout of a term when it applies.
fn ratios<'a>(parts: &TermParts<'a>) -> Option<Vec<Ratio<'a>>> {
    let [(over, total)] = parts.den.as_slice() else {
        return None;
    };
    match over {
        Expr::Atom(a) if a.order() == 1 => {}
        _ => return None,
    }
    if parts.num.is_empty() || !total.is_integer() {
        return None;
    }
    let mut weight = Rational::zero();
    let mut out = Vec::new();
    for (b, m) in &parts.num {
        let Expr::Atom(atom) = b else { return None };
        if !m.is_integer() {
            return None;
        }
        let w = m * Rational::from_integer(atom.order().into());
        weight += &w;
        out.push(Ratio { atom, power: m.clone(), over, over_power: w });
    }
    if &weight != total {
        return None;
    }
    out.sort_by(|a, b| (a.atom.order(), a.atom.base()).cmp(&(b.atom.order(), b.atom.base())));
    Some(out)
}

trait Layout {
    fn symbol(&self, name: &str) -> String;
    fn atom(&self, a: &DiffAtom) -> String;
    fn rational(&self, r: &Rational) -> String;
    fn power(&self, base: &str, exp: &Rational) -> String;
    fn func(&self, name: &str, arg: &str) -> String;
    fn paren(&self, s: &str) -> String;
    fn pending(&self, arg: &str) -> String;
    fn term(&self, parts: &TermParts<'_>, factor: &dyn Fn(&Expr, &Rational) -> String) -> String;
    fn ratio_term(&self, coeff: &Rational, ratios: &[Ratio<'_>], factor: &dyn Fn(&Expr, &Rational) -> String) -> String;
}

fn render_sum(e: &Expr, layout: &dyn Layout) -> String {
    let terms = match e {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let (coeff, factors) = t.split_coefficient();
        let parts = split_term(&factors, coeff);
        let body = render_term(&parts, layout);
        match (i, parts.negative) {
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (0, false) => out.push_str(&body),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn render_term(parts: &TermParts<'_>, layout: &dyn Layout) -> String {
    let factor = |b: &Expr, r: &Rational| render_factor(b, r, layout);
    match ratios(parts) {
        Some(rs) => layout.ratio_term(&parts.coeff, &rs, &factor),
        None => layout.term(parts, &factor),
    }
}

fn render_factor(base: &Expr, exp: &Rational, layout: &dyn Layout) -> String {
    let b = render_base(base, exp.is_one(), layout);
    if exp.is_one() {
        b
    } else {
        layout.power(&b, exp)
    }
}

/// Renders a power base, parenthesized unless it binds tighter than `^`.
fn render_base(base: &Expr, bare: bool, layout: &dyn Layout) -> String {
    match base {
        Expr::Sym(s) => layout.symbol(s.name()),
        Expr::Atom(a) => layout.atom(a),
        Expr::Const(c) if bare || (c.is_integer() && !c.is_negative()) => layout.rational(c),
        Expr::Func(f, arg) => layout.func(f.name(), &render_sum(arg, layout)),
        Expr::Pending(arg) => layout.pending(&render_sum(arg, layout)),
        Expr::Pow(..) | Expr::Product(_) if bare => {
            // Raw, non-canonical trees only.
            let (c, fs) = base.split_coefficient();
            let parts = split_term(&fs, c);
            let body = render_term(&parts, layout);
            layout.paren(&if parts.negative { format!("-{body}") } else { body })
        }
        other => layout.paren(&render_sum(other, layout)),
    }
}

fn is_symbolic(base: &Expr) -> bool {
    matches!(base, Expr::Sym(_))
}

struct Plain;

impl Layout for Plain {
    fn symbol(&self, name: &str) -> String {
        name.to_string()
    }

    fn atom(&self, a: &DiffAtom) -> String {
        let base = a.base();
        match (a.order(), base.is_single_letter()) {
            (1, true) => format!("d{base}"),
            (k, true) => format!("d^{k}{base}"),
            (k, false) => format!("d^{k}({base})"),
        }
    }

    fn rational(&self, r: &Rational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    fn power(&self, base: &str, exp: &Rational) -> String {
        if exp.is_integer() && !exp.is_negative() {
            format!("{base}^{}", exp.numer())
        } else {
            format!("{base}^({})", self.rational(exp))
        }
    }

    fn func(&self, name: &str, arg: &str) -> String {
        format!("{name}({arg})")
    }

    fn paren(&self, s: &str) -> String {
        format!("({s})")
    }

    fn pending(&self, arg: &str) -> String {
        format!("d({arg})")
    }

    fn term(&self, parts: &TermParts<'_>, factor: &dyn Fn(&Expr, &Rational) -> String) -> String {
        let mut out = String::new();
        let show_coeff = !parts.coeff.is_one() || parts.num.is_empty();
        if show_coeff {
            out.push_str(&self.rational(&parts.coeff));
        }
        for (i, (b, r)) in parts.num.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            } else if show_coeff {
                let glue = parts.coeff.is_integer() && is_symbolic(b);
                let star = matches!(b, Expr::Const(_));
                out.push_str(if glue { "" } else if star { "*" } else { " " });
            }
            out.push_str(&factor(b, r));
        }
        for (b, r) in &parts.den {
            out.push('/');
            out.push_str(&factor(b, r));
        }
        out
    }

    fn ratio_term(&self, coeff: &Rational, ratios: &[Ratio<'_>], factor: &dyn Fn(&Expr, &Rational) -> String) -> String {
        let mut pieces = Vec::new();
        if !coeff.is_one() {
            pieces.push(self.rational(coeff));
        }
        for r in ratios {
            let atom = Expr::Atom(r.atom.clone());
            pieces.push(format!("{}/{}", factor(&atom, &r.power), factor(r.over, &r.over_power)));
        }
        pieces.join("*")
    }
}

struct Latex;

impl Latex {
    fn frac(num: &str, den: &str) -> String {
        format!("\\frac{{{num}}}{{{den}}}")
    }
}

impl Layout for Latex {
    fn symbol(&self, name: &str) -> String {
        if name.len() == 1 {
            name.to_string()
        } else {
            format!("\\mathit{{{name}}}")
        }
    }

    fn atom(&self, a: &DiffAtom) -> String {
        let base = self.symbol(a.base().name());
        match a.order() {
            1 => format!("\\mathrm{{d}}{base}"),
            k => format!("\\mathrm{{d}}^{{{k}}}{base}"),
        }
    }

    fn rational(&self, r: &Rational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else if r.is_negative() {
            format!("-{}", Self::frac(&(-r.numer()).to_string(), &r.denom().to_string()))
        } else {
            Self::frac(&r.numer().to_string(), &r.denom().to_string())
        }
    }

    fn power(&self, base: &str, exp: &Rational) -> String {
        // Higher differentials need parentheses: (d^2x)^2, while dx^2 is (dx)^2.
        let base = if base.starts_with("\\mathrm{d}^") {
            format!("({base})")
        } else {
            base.to_string()
        };
        format!("{base}^{{{}}}", self.rational(exp))
    }

    fn func(&self, name: &str, arg: &str) -> String {
        format!("\\{name}\\left({arg}\\right)")
    }

    fn paren(&self, s: &str) -> String {
        format!("\\left({s}\\right)")
    }

    fn pending(&self, arg: &str) -> String {
        format!("\\mathrm{{d}}\\left({arg}\\right)")
    }

    fn term(&self, parts: &TermParts<'_>, factor: &dyn Fn(&Expr, &Rational) -> String) -> String {
        let join = |fs: &[(&Expr, Rational)]| {
            fs.iter().map(|(b, r)| factor(b, r)).collect::<Vec<_>>().join("\\,")
        };
        let coeff_num = Rational::from_integer(parts.coeff.numer().clone());
        let coeff_den = Rational::from_integer(parts.coeff.denom().clone());
        if parts.den.is_empty() && parts.coeff.is_integer() {
            let body = join(&parts.num);
            return match (parts.coeff.is_one(), body.is_empty()) {
                (_, true) => self.rational(&parts.coeff),
                (true, false) => body,
                (false, false) => format!("{}{body}", self.rational(&parts.coeff)),
            };
        }
        let mut num = join(&parts.num);
        if !coeff_num.is_one() || num.is_empty() {
            num = format!("{}{num}", self.rational(&coeff_num));
        }
        let mut den = join(&parts.den);
        if !coeff_den.is_one() {
            den = if den.is_empty() {
                self.rational(&coeff_den)
            } else {
                format!("{}\\,{den}", self.rational(&coeff_den))
            };
        }
        Self::frac(&num, &den)
    }

    fn ratio_term(&self, coeff: &Rational, ratios: &[Ratio<'_>], factor: &dyn Fn(&Expr, &Rational) -> String) -> String {
        let mut out = if coeff.is_one() { String::new() } else { self.rational(coeff) };
        for r in ratios {
            let atom = Expr::Atom(r.atom.clone());
            out.push_str(&Self::frac(&factor(&atom, &r.power), &factor(r.over, &r.over_power)));
        }
        out
    }
}
