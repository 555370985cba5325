use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ρ as a function of the node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRule", into = "String")]
pub enum RhoRule {
    Abs(usize),
    /// `n - c`.
    Minus(usize),
    /// `⌊n / c⌋`.
    Div(usize),
    /// `⌊√n⌋`.
    Sqrt,
    /// The value intended by a gadget generator.
    Auto,
}

impl RhoRule {
    /// Evaluates the rule and clamps it into `1..=n-1`.
    pub fn eval(self, n: usize, auto: Option<usize>) -> Result<usize> {
        if n < 2 {
            return Err(Error::param(format!("no valid rho for {n} nodes")));
        }
        let raw = match self {
            RhoRule::Abs(r) => r,
            RhoRule::Minus(c) => n.saturating_sub(c),
            RhoRule::Div(c) => n / c,
            RhoRule::Sqrt => (n as f64).sqrt().floor() as usize,
            RhoRule::Auto => auto.ok_or_else(|| {
                Error::param("rho = auto needs a generator that provides rho")
            })?,
        };
        Ok(raw.clamp(1, n - 1))
    }
}

impl FromStr for RhoRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::param(format!("cannot parse rho rule '{s}'"));
        let num = |x: &str| x.parse::<usize>().map_err(|_| bad());
        let rule = if t == "auto" {
            RhoRule::Auto
        } else if t == "sqrt(n)" || t == "√n" {
            RhoRule::Sqrt
        } else if t == "n" {
            RhoRule::Minus(0)
        } else if let Some(c) = t.strip_prefix("n-") {
            RhoRule::Minus(num(c)?)
        } else if let Some(c) = t.strip_prefix("n/") {
            let c = num(c)?;
            if c == 0 {
                return Err(bad());
            }
            RhoRule::Div(c)
        } else {
            RhoRule::Abs(num(&t)?)
        };
        Ok(rule)
    }
}

impl fmt::Display for RhoRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoRule::Abs(r) => write!(f, "{r}"),
            RhoRule::Minus(c) => write!(f, "n-{c}"),
            RhoRule::Div(c) => write!(f, "n/{c}"),
            RhoRule::Sqrt => f.write_str("sqrt(n)"),
            RhoRule::Auto => f.write_str("auto"),
        }
    }
}

/// Specs may write a plain integer or an expression string.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawRule {
    Int(usize),
    Text(String),
}

impl TryFrom<RawRule> for RhoRule {
    type Error = Error;

    fn try_from(raw: RawRule) -> Result<Self> {
        match raw {
            RawRule::Int(r) => Ok(RhoRule::Abs(r)),
            RawRule::Text(s) => s.parse(),
        }
    }
}

impl From<RhoRule> for String {
    fn from(r: RhoRule) -> String {
        r.to_string()
    }
}
