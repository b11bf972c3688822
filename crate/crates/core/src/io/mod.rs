//! Text codecs for instances, models, targets and scenarios.
//!
//! All writers emit LF line endings and format reals with the shortest
//! representation that parses back to the same `f64`, so every
//! `read(write(x)) == x` holds bit for bit. Readers accept any whitespace
//! (including CRLF), reject non-finite numbers, and check declared sizes
//! against the remaining input before allocating.

mod model_file;
mod native;
mod tables;

pub use model_file::{mps_column_names, write_lp, write_mps};
pub use native::{read_std, read_stochastic, write_std, write_stochastic, write_stochastic_to, StochasticBlock};
pub use tables::{
    read_corr, read_graph, read_hkwmat, read_moments, read_probs, write_corr, write_graph, write_hkwmat,
    write_moments, write_probs,
};

use std::fmt;

use crate::error::{Error, Result};

/// File formats known to the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormatId {
    Std,
    Lp,
    Mps,
    Graph,
    Moments,
    Corr,
    Probs,
    HkwMat,
    Stoch,
}

impl FormatId {
    pub const ALL: [FormatId; 9] = [
        FormatId::Std,
        FormatId::Lp,
        FormatId::Mps,
        FormatId::Graph,
        FormatId::Moments,
        FormatId::Corr,
        FormatId::Probs,
        FormatId::HkwMat,
        FormatId::Stoch,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            FormatId::Std => "std",
            FormatId::Lp => "lp",
            FormatId::Mps => "mps",
            FormatId::Graph => "graph",
            FormatId::Moments => "mom",
            FormatId::Corr => "corr",
            FormatId::Probs => "prob",
            FormatId::HkwMat => "hkw",
            FormatId::Stoch => "stoch",
        }
    }

    pub fn is_readable(self) -> bool {
        !matches!(self, FormatId::Lp | FormatId::Mps)
    }

    /// Single-letter instance input code used on the command line.
    pub fn from_input_code(code: &str) -> Option<FormatId> {
        match code {
            "S" => Some(FormatId::Std),
            _ => None,
        }
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FormatId::Std => "STD",
            FormatId::Lp => "LP",
            FormatId::Mps => "MPS",
            FormatId::Graph => "GRAPH",
            FormatId::Moments => "MOMENTS",
            FormatId::Corr => "CORR",
            FormatId::Probs => "PROBS",
            FormatId::HkwMat => "HKWMAT",
            FormatId::Stoch => "STOCH",
        };
        f.write_str(name)
    }
}

/// Whitespace tokens with their 1-based line numbers.
pub(crate) struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last_line = 1;
        for (i, line) in text.lines().enumerate() {
            last_line = i + 1;
            items.extend(line.split_whitespace().map(|t| (i + 1, t)));
        }
        Tokens {
            items,
            pos: 0,
            last_line,
        }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.items.len() - self.pos
    }

    /// Line of the next token (or of the end of input).
    pub(crate) fn line(&self) -> usize {
        self.items.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    pub(crate) fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self
            .items
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(self.last_line, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    pub(crate) fn usize(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.next(what)?;
        tok.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("expected {what} (non-negative integer), found `{tok}`")))
    }

    /// 1-based index in `1..=count`, returned 0-based.
    pub(crate) fn index(&mut self, what: &str, count: usize) -> Result<usize> {
        let line = self.line();
        let v = self.usize(what)?;
        if v == 0 || v > count {
            return Err(Error::parse(line, format!("{what} {v} out of range 1..={count}")));
        }
        Ok(v - 1)
    }

    pub(crate) fn real(&mut self, what: &str) -> Result<f64> {
        let (line, tok) = self.next(what)?;
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::parse(line, format!("expected {what} (number), found `{tok}`")))?;
        if !v.is_finite() {
            return Err(Error::parse(line, format!("{what} must be finite, found `{tok}`")));
        }
        Ok(v)
    }

    pub(crate) fn nonneg(&mut self, what: &str) -> Result<f64> {
        let line = self.line();
        let v = self.real(what)?;
        if v < 0.0 {
            return Err(Error::parse(line, format!("{what} {v} is negative")));
        }
        Ok(v)
    }

    /// Fail unless at least `needed` tokens remain; `needed` is `None` when
    /// the declared sizes overflow.
    pub(crate) fn require(&self, needed: Option<usize>, what: &str) -> Result<()> {
        match needed {
            Some(n) if n <= self.remaining() => Ok(()),
            _ => Err(Error::parse(
                self.last_line,
                format!(
                    "declared {what} needs {} values but only {} remain",
                    needed.map_or_else(|| "too many".to_string(), |n| n.to_string()),
                    self.remaining()
                ),
            )),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        match self.items.get(self.pos) {
            None => Ok(()),
            Some(&(line, tok)) => Err(Error::parse(line, format!("unexpected trailing token `{tok}`"))),
        }
    }
}

/// `a * b + c` with overflow reported as `None`.
pub(crate) fn mul_add(a: usize, b: usize, c: usize) -> Option<usize> {
    a.checked_mul(b)?.checked_add(c)
}

/// Shortest round-trip text: plain integers where exact, scientific
/// notation at extreme magnitudes.
pub(crate) fn push_real(out: &mut String, v: f64) {
    use std::fmt::Write;
    if v.fract() == 0.0 && v.abs() < 1e16 {
        write!(out, "{v}")
    } else {
        write!(out, "{v:?}")
    }
    .expect("writing to a String");
}

pub(crate) fn fmt_real(v: f64) -> String {
    let mut s = String::new();
    push_real(&mut s, v);
    s
}

pub(crate) fn push_reals(out: &mut String, values: &[f64]) {
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        push_real(out, v);
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_track_lines_and_crlf() {
        let mut t = Tokens::new("3 4\r\n\r\n 5.5 x\n");
        assert_eq!(t.usize("a").unwrap(), 3);
        assert_eq!(t.line(), 1);
        t.next("b").unwrap();
        assert_eq!(t.line(), 3);
        assert_eq!(t.real("c").unwrap(), 5.5);
        assert_eq!(t.real("d"), Err(Error::parse(3, "expected d (number), found `x`")));
        assert!(matches!(t.next("e"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn rejects_non_finite_and_bad_indices() {
        assert!(Tokens::new("inf").real("v").is_err());
        assert!(Tokens::new("NaN").real("v").is_err());
        assert!(Tokens::new("0").index("node", 3).is_err());
        assert!(Tokens::new("4").index("node", 3).is_err());
        assert_eq!(Tokens::new("3").index("node", 3).unwrap(), 2);
        assert!(Tokens::new("-1").usize("n").is_err());
    }

    #[test]
    fn shortest_round_trip_formatting() {
        let mut s = String::new();
        let values = [5.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e21, 123.25, -0.0];
        push_reals(&mut s, &values);
        assert_eq!(s, "5 0.1 0.3333333333333333 1e-300 -2.5e21 123.25 -0\n");
        let back: Vec<f64> = s.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(back.len(), values.len());
        for (a, b) in back.iter().zip(values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn registry() {
        assert_eq!(FormatId::from_input_code("S"), Some(FormatId::Std));
        assert_eq!(FormatId::from_input_code("Q"), None);
        let writable_only: Vec<_> = FormatId::ALL.iter().filter(|f| !f.is_readable()).collect();
        assert_eq!(writable_only, vec![&FormatId::Lp, &FormatId::Mps]);
    }
}
