//! Text formats for problem instances and certificates.
//!
//! Problem file, one declaration per line, `#` starts a comment:
//!
//! ```text
//! vars: x, y
//! f: x + y + 3
//! g: y                  # zero or more
//! h: x^2 - 1            # one or more
//! h: y^2 - x - 2
//! radical: true         # optional, checked
//! graded: true          # optional, checked
//! options:              # optional, `key = value` lines until the next declaration
//!   engine = sdp
//!   order = 2
//! ```
//!
//! Certificate file:
//!
//! ```text
//! sos-cert certificate
//! mode: strict                      # or nonneg
//! vars: x, y
//! block 0                           # free squares; block i multiplies g_i
//! weight 3/2 square 1/3*x + 1
//! weight 4/3 square x witness 1     # witness r with square ≡ f·r, nonneg mode
//! cofactor 1 -3/2                   # p_1, multiplies h_1
//! scaling nu0 9 12                  # optional; checked when present
//! scaling nu1 1
//! scaling nu2 2
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::certifier::{Certificate, Mode, ProblemInstance, WeightedSquare};
use crate::parse::{parse_poly, parse_rational};
use crate::poly::{fmt_rational, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub instance: ProblemInstance,
    /// `key = value` pairs of the options block, in file order.
    pub options: Vec<(String, String)>,
}

impl ProblemFile {
    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("").trim()
}

fn parse_names(line: usize, s: &str) -> Result<Vec<String>, FormatError> {
    let names: Vec<String> = s.split([',', ' ']).map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect();
    if names.is_empty() {
        return Err(err(line, "empty variable list"));
    }
    for (i, n) in names.iter().enumerate() {
        let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && n.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !ok {
            return Err(err(line, format!("invalid variable name `{}`", n)));
        }
        if names[..i].contains(n) {
            return Err(err(line, format!("duplicate variable `{}`", n)));
        }
    }
    Ok(names)
}

fn parse_bool(line: usize, s: &str) -> Result<bool, FormatError> {
    match s {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(err(line, format!("expected true or false, found `{}`", s))),
    }
}

fn poly_at(line: usize, s: &str, names: &[String]) -> Result<Poly, FormatError> {
    parse_poly(s, names).map_err(|e| err(line, e.to_string()))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, FormatError> {
    let mut names: Option<Vec<String>> = None;
    let mut f: Option<Poly> = None;
    let (mut g, mut h) = (Vec::new(), Vec::new());
    let (mut radical, mut graded) = (None, None);
    let mut options = Vec::new();
    let mut in_options = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        last_line = ln;
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        let Some((key, rest)) = l.split_once(':').filter(|(k, _)| !k.contains('=')) else {
            if in_options {
                let (k, v) = l.split_once('=').ok_or_else(|| err(ln, "expected `key = value` in options"))?;
                options.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            return Err(err(ln, "expected `key: value`"));
        };
        in_options = false;
        let (key, rest) = (key.trim(), rest.trim());
        let need_names = || names.clone().ok_or_else(|| err(ln, "`vars:` must come first"));
        match key {
            "vars" => {
                if names.is_some() {
                    return Err(err(ln, "duplicate `vars:`"));
                }
                names = Some(parse_names(ln, rest)?);
            }
            "f" => {
                if f.is_some() {
                    return Err(err(ln, "duplicate `f:`"));
                }
                f = Some(poly_at(ln, rest, &need_names()?)?);
            }
            "g" => g.push(poly_at(ln, rest, &need_names()?)?),
            "h" => h.push(poly_at(ln, rest, &need_names()?)?),
            "radical" => radical = Some(parse_bool(ln, rest)?),
            "graded" => graded = Some(parse_bool(ln, rest)?),
            "options" => {
                in_options = true;
                if !rest.is_empty() {
                    return Err(err(ln, "options go on the following lines"));
                }
            }
            _ => return Err(err(ln, format!("unknown key `{}`", key))),
        }
    }
    let names = names.ok_or_else(|| err(last_line.max(1), "missing `vars:`"))?;
    let f = f.ok_or_else(|| err(last_line.max(1), "missing `f:`"))?;
    if h.is_empty() {
        return Err(err(last_line.max(1), "at least one equality constraint required"));
    }
    let mut instance = ProblemInstance::new(names, f, g, h);
    instance.radical = radical;
    instance.graded = graded;
    Ok(ProblemFile { instance, options })
}

pub fn write_problem(p: &ProblemFile) -> String {
    let inst = &p.instance;
    let n = &inst.names;
    let mut s = String::new();
    let _ = writeln!(s, "vars: {}", n.join(", "));
    let _ = writeln!(s, "f: {}", inst.f.fmt_with(n));
    for g in &inst.g {
        let _ = writeln!(s, "g: {}", g.fmt_with(n));
    }
    for h in &inst.h {
        let _ = writeln!(s, "h: {}", h.fmt_with(n));
    }
    if let Some(r) = inst.radical {
        let _ = writeln!(s, "radical: {}", r);
    }
    if let Some(r) = inst.graded {
        let _ = writeln!(s, "graded: {}", r);
    }
    if !p.options.is_empty() {
        let _ = writeln!(s, "options:");
        for (k, v) in &p.options {
            let _ = writeln!(s, "  {} = {}", k, v);
        }
    }
    s
}

const HEADER: &str = "sos-cert certificate";

pub fn write_certificate(c: &Certificate) -> String {
    let n = &c.names;
    let mut s = String::new();
    let _ = writeln!(s, "{}", HEADER);
    let _ = writeln!(s, "mode: {}", if c.mode == Mode::Strict { "strict" } else { "nonneg" });
    let _ = writeln!(s, "vars: {}", n.join(", "));
    for (i, b) in c.blocks.iter().enumerate() {
        let _ = writeln!(s, "block {}", i);
        for ws in b {
            let _ = write!(s, "weight {} square {}", fmt_rational(&ws.weight), ws.square.fmt_with(n));
            if let Some(w) = &ws.witness {
                let _ = write!(s, " witness {}", w.fmt_with(n));
            }
            s.push('\n');
        }
    }
    for (j, p) in c.cofactors.iter().enumerate() {
        let _ = writeln!(s, "cofactor {} {}", j + 1, p.fmt_with(n));
    }
    let sc = c.scalings();
    let nu0: Vec<String> = sc.nu0.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "scaling nu0 {}", nu0.join(" "));
    let _ = writeln!(s, "scaling nu1 {}", sc.nu1);
    let _ = writeln!(s, "scaling nu2 {}", sc.nu2);
    s
}

/// Split `text` at the first occurrence of the whole word `kw`.
fn split_word<'a>(text: &'a str, kw: &str) -> Option<(&'a str, &'a str)> {
    let mut start = 0;
    while let Some(pos) = text[start..].find(kw) {
        let a = start + pos;
        let b = a + kw.len();
        let before = text[..a].chars().last().map_or(true, char::is_whitespace);
        let after = text[b..].chars().next().map_or(true, char::is_whitespace);
        if before && after {
            return Some((&text[..a], &text[b..]));
        }
        start = b;
    }
    None
}

pub fn parse_certificate(text: &str) -> Result<Certificate, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l == HEADER => {}
        Some((ln, _)) => return Err(err(ln, format!("expected header `{}`", HEADER))),
        None => return Err(err(1, "empty certificate")),
    }
    let mut mode = None;
    let mut names: Option<Vec<String>> = None;
    let mut blocks: Vec<Vec<WeightedSquare>> = Vec::new();
    let mut cofactors: Vec<Poly> = Vec::new();
    let mut scalings: Vec<(usize, String, Vec<BigInt>)> = Vec::new();
    for (ln, l) in lines {
        let need_names = || names.clone().ok_or_else(|| err(ln, "`vars:` must come before the squares"));
        if let Some(rest) = l.strip_prefix("mode:") {
            mode = Some(match rest.trim() {
                "strict" => Mode::Strict,
                "nonneg" => Mode::Nonnegative,
                m => return Err(err(ln, format!("unknown mode `{}`", m))),
            });
        } else if let Some(rest) = l.strip_prefix("vars:") {
            names = Some(parse_names(ln, rest)?);
        } else if let Some(rest) = l.strip_prefix("block ") {
            let i: usize = rest.trim().parse().map_err(|_| err(ln, "block index"))?;
            if i != blocks.len() {
                return Err(err(ln, format!("expected block {}", blocks.len())));
            }
            blocks.push(Vec::new());
        } else if let Some(rest) = l.strip_prefix("weight ") {
            let names = need_names()?;
            let blk = blocks.last_mut().ok_or_else(|| err(ln, "square outside a block"))?;
            let (w, rest) = split_word(rest, "square").ok_or_else(|| err(ln, "expected `square`"))?;
            let weight = parse_rational(w.trim()).ok_or_else(|| err(ln, format!("bad weight `{}`", w.trim())))?;
            let (sq, wit) = match split_word(rest, "witness") {
                Some((a, b)) => (a, Some(b)),
                None => (rest, None),
            };
            let square = poly_at(ln, sq.trim(), &names)?;
            let witness = wit.map(|w| poly_at(ln, w.trim(), &names)).transpose()?;
            blk.push(WeightedSquare { weight, square, witness });
        } else if let Some(rest) = l.strip_prefix("cofactor ") {
            let names = need_names()?;
            let rest = rest.trim_start();
            let (j, p) = rest.split_once(char::is_whitespace).ok_or_else(|| err(ln, "expected `cofactor <j> <poly>`"))?;
            let j: usize = j.parse().map_err(|_| err(ln, "cofactor index"))?;
            if j == 0 {
                return Err(err(ln, "cofactor indices start at 1"));
            }
            if cofactors.len() < j {
                cofactors.resize(j, Poly::zero(names.len()));
            }
            cofactors[j - 1] = poly_at(ln, p.trim(), &names)?;
        } else if let Some(rest) = l.strip_prefix("scaling ") {
            let mut it = rest.split_whitespace();
            let key = it.next().ok_or_else(|| err(ln, "scaling name"))?.to_string();
            let vals = it.map(|t| t.parse::<BigInt>().map_err(|_| err(ln, "scaling value"))).collect::<Result<Vec<_>, _>>()?;
            scalings.push((ln, key, vals));
        } else {
            return Err(err(ln, "unrecognized line"));
        }
    }
    let names = names.ok_or_else(|| err(1, "missing `vars:`"))?;
    let cert = Certificate { mode: mode.ok_or_else(|| err(1, "missing `mode:`"))?, names, blocks, cofactors };
    let sc = cert.scalings();
    for (ln, key, vals) in scalings {
        let ok = match key.as_str() {
            "nu0" => vals == sc.nu0,
            "nu1" => vals == [sc.nu1.clone()],
            "nu2" => vals == [sc.nu2.clone()],
            _ => return Err(err(ln, format!("unknown scaling `{}`", key))),
        };
        if !ok {
            return Err(err(ln, format!("scaling {} does not match the certificate", key)));
        }
    }
    Ok(cert)
}
