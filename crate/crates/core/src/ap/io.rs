//! Text format for trigonometric polynomials:
//!
//! ```text
//! N 1
//! P 2
//! lambda 1.0000000000000000e0
//! lambda 1.4142135623730951e0
//! 1 0  5.0000000000000000e-1  0.0000000000000000e0
//! -1 0  5.0000000000000000e-1  0.0000000000000000e0
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::{FreqIndex, GeneratorSet, TrigPolynomial};
use crate::error::{Error, Result};

/// 17 significant digits with an explicit exponent.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_polynomial(p: &TrigPolynomial) -> String {
    let g = p.gens();
    let mut out = format!("N {}\nP {}\n", g.ambient_dim(), g.rank());
    for lam in g.generators() {
        out.push_str("lambda");
        for v in lam {
            out.push(' ');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    for (n, c) in p.coeffs() {
        let idx: Vec<String> = n.0.iter().map(|k| k.to_string()).collect();
        out.push_str(&format!(
            "{}  {}  {}\n",
            idx.join(" "),
            fmt_f64(c.re),
            fmt_f64(c.im)
        ));
    }
    out
}

pub fn read_polynomial(text: &str) -> Result<TrigPolynomial> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut ambient = None;
    let mut rank = None;
    let mut lambdas: Vec<Vec<f64>> = Vec::new();
    let mut coeffs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        match head {
            "N" | "P" => {
                let v: usize = tok
                    .next()
                    .ok_or_else(|| err(line_no, format!("{head} needs a value")))?
                    .parse()
                    .map_err(|e| err(line_no, format!("{e}")))?;
                if head == "N" {
                    ambient = Some(v);
                } else {
                    rank = Some(v);
                }
            }
            "lambda" => {
                let v: Vec<f64> = tok
                    .map(|t| t.parse::<f64>().map_err(|e| err(line_no, format!("{e}"))))
                    .collect::<Result<_>>()?;
                if Some(v.len()) != ambient {
                    return Err(err(line_no, "lambda length differs from N".into()));
                }
                lambdas.push(v);
            }
            _ => {
                let p = rank.ok_or_else(|| err(line_no, "coefficient before header".into()))?;
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != p + 2 {
                    return Err(err(
                        line_no,
                        format!("expected {} fields, found {}", p + 2, fields.len()),
                    ));
                }
                let n: Vec<i32> = fields[..p]
                    .iter()
                    .map(|t| t.parse::<i32>().map_err(|e| err(line_no, format!("{e}"))))
                    .collect::<Result<_>>()?;
                let re: f64 = fields[p].parse().map_err(|e| err(line_no, format!("{e}")))?;
                let im: f64 = fields[p + 1]
                    .parse()
                    .map_err(|e| err(line_no, format!("{e}")))?;
                coeffs.insert(FreqIndex(n), Complex64::new(re, im));
            }
        }
    }
    let rank = rank.ok_or_else(|| err(0, "missing P".into()))?;
    if lambdas.len() != rank {
        return Err(err(0, format!("expected {rank} lambda lines, found {}", lambdas.len())));
    }
    let gens = Arc::new(GeneratorSet::new(lambdas)?);
    TrigPolynomial::from_coeffs(gens, coeffs)
}
