//! Line-oriented knowledge-base files.
//!
//! ```text
//! # comment
//! atom student
//! cond sport | student = [0.90, 0.90]
//! indep ii student ; sport ; single
//! ```
//!
//! Undeclared atoms used by `cond` lines are declared on first use. Repeated
//! `cond` lines for the same pair are intersected.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::intervals::ProbInterval;
use crate::network::{AtomId, IndepKind, Network};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Reject `indep` lines naming atoms not declared earlier.
    pub strict: bool,
}

pub fn parse_kb(text: &str) -> Result<Network> {
    parse_kb_with(text, ParseOptions::default())
}

pub fn parse_kb_with(text: &str, opts: ParseOptions) -> Result<Network> {
    let mut net = Network::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match body.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (body, ""),
        };
        match keyword {
            "atom" => {
                let name = single_token(rest, line, "atom name")?;
                net.add_atom(name).map_err(|e| at_line(e, line))?;
            }
            "cond" => parse_cond(&mut net, rest, line)?,
            "indep" => parse_indep(&mut net, rest, line, opts)?,
            other => {
                return Err(Error::Syntax {
                    line,
                    reason: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    Ok(net)
}

fn at_line(err: Error, line: usize) -> Error {
    match err {
        Error::InvalidName(name) => Error::Syntax {
            line,
            reason: format!("invalid atom name `{name}`"),
        },
        other => other,
    }
}

fn single_token<'a>(s: &'a str, line: usize, what: &str) -> Result<&'a str> {
    let s = s.trim();
    if s.is_empty() || s.split_whitespace().count() != 1 {
        return Err(Error::Syntax {
            line,
            reason: format!("expected a single {what}, found `{s}`"),
        });
    }
    Ok(s)
}

fn parse_cond(net: &mut Network, rest: &str, line: usize) -> Result<()> {
    let syntax = |reason: &str| Error::Syntax {
        line,
        reason: reason.to_string(),
    };
    let (lhs, rhs) = rest
        .split_once('=')
        .ok_or_else(|| syntax("expected `TARGET | GIVEN = [LO, HI]`"))?;
    let (target, given) = lhs
        .split_once('|')
        .ok_or_else(|| syntax("expected `|` between target and given"))?;
    let target = single_token(target, line, "target atom")?;
    let given = single_token(given, line, "given atom")?;
    if target == given {
        return Err(syntax("an atom cannot be conditioned on itself"));
    }
    let iv = parse_bracket(rhs.trim(), line)?;
    let t = net.add_atom(target).map_err(|e| at_line(e, line))?;
    let g = net.add_atom(given).map_err(|e| at_line(e, line))?;
    net.constrain(t, g, iv).map_err(|_| Error::Bounds {
        line,
        reason: format!(
            "{iv} does not overlap earlier bounds {} for {target} | {given}",
            net.bound(t, g)
        ),
    })?;
    Ok(())
}

fn parse_bracket(s: &str, line: usize) -> Result<ProbInterval> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Syntax {
            line,
            reason: format!("expected `[LO, HI]`, found `{s}`"),
        })?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| Error::Syntax {
        line,
        reason: "expected a comma between bounds".to_string(),
    })?;
    let lo = parse_decimal(lo.trim(), line)?;
    let hi = parse_decimal(hi.trim(), line)?;
    ProbInterval::new(lo, hi).map_err(|e| Error::Bounds {
        line,
        reason: e.to_string(),
    })
}

/// Unsigned decimal with at most six fraction digits.
fn parse_decimal(s: &str, line: usize) -> Result<f64> {
    let bad = || Error::Syntax {
        line,
        reason: format!("`{s}` is not a decimal with at most 6 fraction digits"),
    };
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if int.is_empty() || !digits(int) || !digits(frac) || frac.len() > 6 {
        return Err(bad());
    }
    s.parse::<f64>().map_err(|_| bad())
}

fn parse_indep(net: &mut Network, rest: &str, line: usize, opts: ParseOptions) -> Result<()> {
    let (kind, atoms) = match rest.split_once(char::is_whitespace) {
        Some((k, a)) => (k, a),
        None => (rest, ""),
    };
    let kind = match kind {
        "i" => IndepKind::I,
        "ii" => IndepKind::Ii,
        "iii" => IndepKind::Iii,
        other => {
            return Err(Error::Syntax {
                line,
                reason: format!("independence kind must be i, ii or iii, found `{other}`"),
            })
        }
    };
    let names: Vec<&str> = atoms.split(';').map(str::trim).collect();
    if names.len() != 3 {
        return Err(Error::Syntax {
            line,
            reason: "expected `indep KIND A ; B ; C`".to_string(),
        });
    }
    let mut ids = [AtomId(0); 3];
    for (slot, name) in ids.iter_mut().zip(&names) {
        let name = single_token(name, line, "atom name")?;
        *slot = if opts.strict {
            net.lookup(name)?
        } else {
            net.add_atom(name).map_err(|e| at_line(e, line))?
        };
    }
    net.declare_indep(kind, ids[0], ids[1], ids[2])
        .map_err(|e| Error::Syntax {
            line,
            reason: e.to_string(),
        })
}

/// Rounds to six decimals outward: lows down, highs up. Values within
/// 1e-6 ulp of a 6-decimal grid point snap to it.
fn six_decimals(x: f64, up: bool) -> f64 {
    let scaled = x * 1e6;
    let nearest = scaled.round();
    let q = if (scaled - nearest).abs() <= 1e-6 {
        nearest
    } else if up {
        scaled.ceil()
    } else {
        scaled.floor()
    };
    (q / 1e6).clamp(0.0, 1.0)
}

pub fn format_bounds(iv: &ProbInterval) -> String {
    format!(
        "[{:.6}, {:.6}]",
        six_decimals(iv.lo(), false),
        six_decimals(iv.hi(), true)
    )
}

/// Writes the base part of `net` in the KB grammar: atoms, then non-vacuous
/// `cond` lines in row-major `(target, given)` order, then `indep` lines.
/// Auxiliary nodes are not part of the file format and are skipped.
pub fn serialize_kb(net: &Network) -> String {
    let mut out = String::new();
    let base: Vec<AtomId> = net.base_atoms().map(|a| a.id).collect();
    for &id in &base {
        let _ = writeln!(out, "atom {}", net.name(id));
    }
    for &t in &base {
        for &g in &base {
            let iv = net.bound(t, g);
            if t != g && !iv.is_vacuous() {
                let _ = writeln!(out, "cond {} | {} = {}", net.name(t), net.name(g), format_bounds(&iv));
            }
        }
    }
    for d in net.indeps() {
        let _ = writeln!(
            out,
            "indep {} {} ; {} ; {}",
            d.kind.as_str(),
            net.name(d.a),
            net.name(d.b),
            net.name(d.c)
        );
    }
    out
}
