//! [`Expr`] to text. ASCII output re-parses to an equal expression; Unicode
//! and LaTeX are display only.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::expr::canon::total_degree;
use crate::expr::{Expr, Func};
use crate::ibp::{Sign, Table};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Ascii,
    Unicode,
    Latex,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "unicode" => Ok(Format::Unicode),
            "latex" => Ok(Format::Latex),
            other => Err(format!("unknown format `{other}` (expected ascii, unicode or latex)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Ascii => "ascii",
            Format::Unicode => "unicode",
            Format::Latex => "latex",
        })
    }
}

impl Format {
    fn minus(self) -> &'static str {
        match self {
            Format::Unicode => "−",
            _ => "-",
        }
    }

    fn times(self) -> &'static str {
        match self {
            Format::Ascii => "*",
            Format::Unicode => "·",
            Format::Latex => " ",
        }
    }
}

pub fn render(e: &Expr, format: Format) -> String {
    let (negative, body) = signed(e, format);
    if negative {
        format!("{}{}", format.minus(), body)
    } else {
        body
    }
}

fn signed(e: &Expr, fmt: Format) -> (bool, String) {
    match e {
        Expr::Const(r) => (r.is_negative(), number(&r.abs(), fmt, false)),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Const(c)) => (c.is_negative(), product(&c.abs(), &fs[1..], fmt)),
            _ => (false, product(&Rational::one(), fs, fmt)),
        },
        Expr::Add(ts) => (false, sum(ts, fmt)),
        Expr::Pow(_, x) if x.as_const().is_some_and(Rational::is_negative) => {
            (false, product(&Rational::one(), std::slice::from_ref(e), fmt))
        }
        other => (false, factor(other, fmt)),
    }
}

fn number(r: &Rational, fmt: Format, in_product: bool) -> String {
    if r.is_integer() {
        return r.to_string();
    }
    match fmt {
        Format::Latex => format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom()),
        _ if in_product => format!("({}/{})", r.numer(), r.denom()),
        _ => format!("{}/{}", r.numer(), r.denom()),
    }
}

fn sum(ts: &[Expr], fmt: Format) -> String {
    let mut ordered: Vec<&Expr> = ts.iter().collect();
    ordered.sort_by_key(|t| (Reverse(total_degree(t)), Reverse(*t)));
    let mut out = String::new();
    for (i, t) in ordered.into_iter().enumerate() {
        let (neg, body) = signed(t, fmt);
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push_str(fmt.minus()),
            (_, false) => out.push_str(" + "),
            (_, true) => {
                out.push(' ');
                out.push_str(fmt.minus());
                out.push(' ');
            }
        }
        out.push_str(&body);
    }
    out
}

fn join_factors(parts: &[String], fmt: Format) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 && !(fmt == Format::Latex && p.starts_with('\\')) {
            out.push_str(fmt.times());
        }
        out.push_str(p);
    }
    out
}

/// `coeff` is positive.
/// Positive rational `k` with `sum / k` having coprime integer coefficients.
fn content(ts: &[Expr]) -> Rational {
    let (mut num, mut den) = (num_bigint::BigInt::from(0), num_bigint::BigInt::from(1));
    for t in ts {
        let c = t.split_coefficient().0;
        num = Rational::gcd_integers(&num, c.numer());
        den = num_integer::Integer::lcm(&den, c.denom());
    }
    Rational::new(num, den).abs()
}

fn product(coeff: &Rational, fs: &[Expr], fmt: Format) -> String {
    // a lone sum under a coefficient shows integer coefficients, its content
    // joining the coefficient
    let mut coeff = coeff.clone();
    let mut fs = fs.to_vec();
    if let [i] = fs.iter().enumerate().filter(|(_, f)| matches!(f, Expr::Add(_))).map(|(i, _)| i).collect::<Vec<_>>()[..] {
        if let Expr::Add(ts) = &fs[i] {
            let k = content(ts);
            if !k.is_one() && !k.is_zero() && !coeff.abs().is_one() {
                coeff = &coeff * &k;
                fs[i] = Expr::constant(k.recip()) * fs[i].clone();
            }
        }
    }
    let coeff = &coeff;
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    // polynomial factors read first: (x^2 - 1)*sin(x)
    let mut ordered: Vec<&Expr> = fs.iter().collect();
    ordered.sort_by_key(|f| match f {
        Expr::Const(_) | Expr::Sym(_) => 0,
        Expr::Pow(b, _) if matches!(**b, Expr::Sym(_) | Expr::Const(_)) => 0,
        Expr::Add(_) => 1,
        _ => 2,
    });
    for f in ordered {
        match f {
            Expr::Pow(b, x) if !b.is_zero() && x.as_const().is_some_and(Rational::is_negative) => {
                let q = -x.as_const().unwrap();
                den.push(power(b, &Expr::Const(q), fmt));
            }
            other => num.push(factor(other, fmt)),
        }
    }
    if fmt == Format::Latex {
        if den.is_empty() {
            let mut parts = Vec::new();
            if !coeff.is_one() {
                parts.push(number(coeff, fmt, true));
            }
            parts.extend(num);
            return join_factors(&parts, fmt);
        }
        let mut n = Vec::new();
        if !coeff.numer().to_string().eq("1") {
            n.push(coeff.numer().to_string());
        }
        n.extend(num);
        let mut d = Vec::new();
        if !coeff.denom().to_string().eq("1") {
            d.push(coeff.denom().to_string());
        }
        d.extend(den);
        let n = if n.is_empty() { "1".to_string() } else { join_factors(&n, fmt) };
        return format!("\\frac{{{}}}{{{}}}", n, join_factors(&d, fmt));
    }
    if !coeff.is_one() {
        num.insert(0, number(coeff, fmt, true));
    }
    let numerator = if num.is_empty() { "1".to_string() } else { join_factors(&num, fmt) };
    if den.is_empty() {
        return numerator;
    }
    let denominator = if den.len() == 1 {
        den.pop().unwrap()
    } else {
        format!("({})", join_factors(&den, fmt))
    };
    format!("{numerator}/{denominator}")
}

fn factor(f: &Expr, fmt: Format) -> String {
    match f {
        Expr::Const(r) if r.is_negative() => format!("({})", render(f, fmt)),
        Expr::Const(r) => number(r, fmt, true),
        Expr::Sym(s) => s.to_string(),
        Expr::Add(ts) => match fmt {
            Format::Latex => format!("\\left({}\\right)", sum(ts, fmt)),
            _ => format!("({})", sum(ts, fmt)),
        },
        Expr::Mul(_) => format!("({})", render(f, fmt)),
        Expr::Pow(b, x) => power(b, x, fmt),
        Expr::Fun(func, arg) => call(*func, arg, fmt),
    }
}

fn call(func: Func, arg: &Expr, fmt: Format) -> String {
    let inner = render(arg, fmt);
    match fmt {
        Format::Latex => match func {
            Func::Exp => format!("e^{{{inner}}}"),
            Func::Atan => format!("\\arctan({inner})"),
            other => format!("\\{}({inner})", other.name()),
        },
        _ => format!("{}({inner})", func.name()),
    }
}

fn superscript(n: i64) -> String {
    n.to_string()
        .chars()
        .map(|c| match c {
            '-' => '⁻',
            '0' => '⁰',
            '1' => '¹',
            '2' => '²',
            '3' => '³',
            '4' => '⁴',
            '5' => '⁵',
            '6' => '⁶',
            '7' => '⁷',
            '8' => '⁸',
            _ => '⁹',
        })
        .collect()
}

fn power(base: &Expr, exponent: &Expr, fmt: Format) -> String {
    if exponent.is_one() {
        return factor(base, fmt);
    }
    if fmt == Format::Latex && exponent.as_const() == Some(&Rational::new(1, 2)) {
        return format!("\\sqrt{{{}}}", render(base, fmt));
    }
    let b = match base {
        Expr::Sym(s) => s.to_string(),
        Expr::Const(r) if r.is_integer() && !r.is_negative() => r.to_string(),
        Expr::Fun(func, arg) => call(*func, arg, fmt),
        other => match fmt {
            Format::Latex => format!("\\left({}\\right)", render(other, fmt)),
            _ => format!("({})", render(other, fmt)),
        },
    };
    match fmt {
        Format::Latex => format!("{b}^{{{}}}", render(exponent, fmt)),
        Format::Unicode => match exponent.as_const().and_then(Rational::to_i64) {
            Some(n) => format!("{b}{}", superscript(n)),
            None => format!("{b}^({})", render(exponent, fmt)),
        },
        Format::Ascii => match exponent {
            Expr::Const(r) if r.is_integer() && !r.is_negative() => format!("{b}^{r}"),
            Expr::Sym(s) => format!("{b}^{s}"),
            other => format!("{b}^({})", render(other, fmt)),
        },
    }
}

/// The sign/u/dv columns, one line per row, with the bottom-row integral
/// beneath once there are at least two rows.
pub fn render_table(t: &Table, format: Format) -> String {
    let var = &t.problem.var;
    let cells: Vec<[String; 3]> = t
        .rows
        .iter()
        .map(|r| {
            let sign = match (r.sign, format) {
                (Sign::Minus, Format::Unicode) => "−".to_string(),
                (s, _) => s.to_string(),
            };
            [sign, render(&r.u, format), render(&r.dv, format)]
        })
        .collect();
    let residual = t.residual().ok().map(|res| {
        let sign = match (res.sign, format) {
            (Sign::Plus, _) => "+",
            (Sign::Minus, Format::Unicode) => "−",
            (Sign::Minus, _) => "-",
        };
        let body = render(&res.integrand, format);
        match format {
            Format::Ascii => format!("residual: {sign}int {body} d{var}"),
            Format::Unicode => format!("residual: {sign}∫ {body} d{var}"),
            Format::Latex => format!("{sign}\\int {body}\\,d{var}"),
        }
    });
    let mut out = String::new();
    if format == Format::Latex {
        out.push_str("\\begin{array}{c|c|c}\n");
        out.push_str("\\pm & u & dv \\\\ \\hline\n");
        for [s, u, dv] in &cells {
            out.push_str(&format!("{s} & {u} & {dv} \\\\\n"));
        }
        out.push_str("\\end{array}\n");
        if let Some(r) = residual {
            out.push_str(&r);
            out.push('\n');
        }
        return out;
    }
    let width = |k: usize, head: &str| {
        cells
            .iter()
            .map(|c| c[k].chars().count())
            .chain([head.chars().count()])
            .max()
            .unwrap_or(0)
    };
    let (wu, wd) = (width(1, "u"), width(2, "dv"));
    let line = |s: &str, u: &str, dv: &str| {
        let pad_u = wu - u.chars().count();
        let pad_d = wd - dv.chars().count();
        format!("{s:<4} {u}{} | {dv}{}", " ".repeat(pad_u), " ".repeat(pad_d)).trim_end().to_string()
    };
    out.push_str(&line("sign", "u", "dv"));
    out.push('\n');
    for [s, u, dv] in &cells {
        out.push_str(&line(s, u, dv));
        out.push('\n');
    }
    if let Some(r) = residual {
        out.push_str(&r);
        out.push('\n');
    }
    out
}
