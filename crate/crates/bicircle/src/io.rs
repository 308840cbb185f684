//! Plain-text formats for moments, parameters, trigonometric polynomials and polynomials.
//!
//! Every file starts with a header `<kind> n m` followed by lines `i j re im`. Blank lines and
//! lines starting with `#` are ignored. Numbers are written with 17 significant digits.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fejer_riesz::TrigPolynomial;
use crate::matrix::C64;
use crate::moments::MomentTable;
use crate::poly::BivariatePolynomial;
use crate::synthesis::ParameterGrid;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn parse_err(line: usize, message: impl Into<String>) -> InputError {
    InputError::Parse { line, message: message.into() }
}

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

struct Parsed {
    n: usize,
    m: usize,
    entries: Vec<(usize, i64, i64, C64)>,
}

fn parse(text: &str, kind: &str) -> Result<Parsed, InputError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, format!("missing `{kind} n m` header")))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 3 || tok[0] != kind {
        return Err(parse_err(hl, format!("expected `{kind} n m`, found `{header}`")));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| parse_err(hl, format!("invalid degree `{s}`")));
    let (n, m) = (dim(tok[1])?, dim(tok[2])?);
    let mut entries = Vec::new();
    for (ln, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(parse_err(ln, format!("expected `i j re im`, found `{l}`")));
        }
        let int = |s: &str| s.parse::<i64>().map_err(|_| parse_err(ln, format!("invalid index `{s}`")));
        let real = |s: &str| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_err(ln, format!("invalid number `{s}`"))),
        };
        entries.push((ln, int(tok[0])?, int(tok[1])?, C64::new(real(tok[2])?, real(tok[3])?)));
    }
    Ok(Parsed { n, m, entries })
}

fn in_half_plane(i: i64, j: i64, n: usize, m: usize) -> bool {
    (i > 0 || (i == 0 && j >= 0)) && i <= n as i64 && j.unsigned_abs() as usize <= m
}

/// Moments `c_{i,j}` on the half plane; entries absent from the file stay missing.
pub fn parse_moments(text: &str) -> Result<MomentTable, InputError> {
    let p = parse(text, "moments")?;
    let mut t = MomentTable::empty(p.n, p.m);
    for (ln, i, j, v) in p.entries {
        if !in_half_plane(i, j, p.n, p.m) {
            return Err(parse_err(ln, format!("index ({i},{j}) outside the half plane of level ({},{})", p.n, p.m)));
        }
        t.insert(i, j, v).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(t)
}

pub fn write_moments(t: &MomentTable) -> String {
    let mut s = format!("moments {} {}\n", t.n_max(), t.m_max());
    for (i, j, v) in t.half_plane() {
        let _ = writeln!(s, "{i} {j} {} {}", fmt_real(v.re), fmt_real(v.im));
    }
    s
}

/// Parameters `u_{i,j}`; free entries absent from the file are zero, `u_{0,0}` defaults to one.
pub fn parse_params(text: &str) -> Result<ParameterGrid, InputError> {
    let p = parse(text, "params")?;
    let mut g = ParameterGrid::new(p.n, p.m, 1.0);
    for (ln, i, j, v) in p.entries {
        if i.unsigned_abs() as usize > p.n || j.unsigned_abs() as usize > p.m {
            return Err(parse_err(ln, format!("index ({i},{j}) outside level ({},{})", p.n, p.m)));
        }
        if i == 0 && j == 0 && v.im != 0.0 {
            return Err(parse_err(ln, "u[0,0] must be real"));
        }
        if !g.is_free(i, j) && !g.is_free(-i, -j) {
            return Err(parse_err(ln, format!("u[{i},{j}] is not a free parameter")));
        }
        g.set(i, j, v);
    }
    Ok(g)
}

pub fn write_params(g: &ParameterGrid) -> String {
    let mut s = format!("params {} {}\n", g.n(), g.m());
    for (i, j) in g.free_indices() {
        let v = g.get(i, j);
        let _ = writeln!(s, "{i} {j} {} {}", fmt_real(v.re), fmt_real(v.im));
    }
    s
}

pub fn parse_trigpoly(text: &str) -> Result<TrigPolynomial, InputError> {
    let p = parse(text, "trigpoly")?;
    let mut f = TrigPolynomial::new(p.n, p.m);
    for (ln, k, l, v) in p.entries {
        if !in_half_plane(k, l, p.n, p.m) {
            return Err(parse_err(ln, format!("index ({k},{l}) outside the half plane of bidegree ({},{})", p.n, p.m)));
        }
        if k == 0 && l == 0 && v.im != 0.0 {
            return Err(parse_err(ln, "f[0,0] must be real"));
        }
        f.set(k, l, v);
    }
    Ok(f)
}

pub fn write_trigpoly(f: &TrigPolynomial) -> String {
    let mut s = format!("trigpoly {} {}\n", f.n(), f.m());
    for (k, l, v) in f.half_plane() {
        let _ = writeln!(s, "{k} {l} {} {}", fmt_real(v.re), fmt_real(v.im));
    }
    s
}

/// Polynomial coefficients `p_{i,j}` of `z^i w^j`, `0 <= i <= n`, `0 <= j <= m`.
pub fn parse_poly(text: &str) -> Result<BivariatePolynomial, InputError> {
    let p = parse(text, "poly")?;
    let mut q = BivariatePolynomial::zero(p.n, p.m);
    for (ln, i, j, v) in p.entries {
        if i < 0 || j < 0 || i as usize > p.n || j as usize > p.m {
            return Err(parse_err(ln, format!("index ({i},{j}) outside bidegree ({},{})", p.n, p.m)));
        }
        q.set(i as usize, j as usize, v);
    }
    Ok(q)
}

pub fn write_poly(p: &BivariatePolynomial) -> String {
    let mut s = format!("poly {} {}\n", p.deg_z(), p.deg_w());
    for i in 0..=p.deg_z() {
        for j in 0..=p.deg_w() {
            let v = p.coeff(i, j);
            let _ = writeln!(s, "{i} {j} {} {}", fmt_real(v.re), fmt_real(v.im));
        }
    }
    s
}

pub fn read_file(path: &str) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_string(), source })
}
