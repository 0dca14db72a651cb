use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Up,
    Down,
    Zero,
    Frustrated,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Up => '↑',
            Symbol::Down => '↓',
            Symbol::Zero => '0',
            Symbol::Frustrated => '?',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '↑' | 'u' | 'U' | '+' => Some(Symbol::Up),
            '↓' | 'd' | 'D' | '-' => Some(Symbol::Down),
            '0' => Some(Symbol::Zero),
            '?' => Some(Symbol::Frustrated),
            _ => None,
        }
    }

    /// +1, -1 or 0.
    pub fn sign(self) -> i8 {
        match self {
            Symbol::Up => 1,
            Symbol::Down => -1,
            _ => 0,
        }
    }
}

/// Current directions of one mode, one symbol per eigenvector slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPattern {
    pub symbols: Vec<Symbol>,
    pub zero_threshold: f64,
}

impl SignPattern {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The ±1/0 vector of the pattern, normalized to unit length.
    pub fn unit_vector(&self) -> Vec<f64> {
        let v: Vec<f64> = self.symbols.iter().map(|s| s.sign() as f64).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return v;
        }
        v.into_iter().map(|x| x / norm).collect()
    }

    pub(crate) fn mark_frustrated(&mut self) {
        for s in &mut self.symbols {
            if *s == Symbol::Zero {
                *s = Symbol::Frustrated;
            }
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for SignPattern {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .chars()
            .map(|c| Symbol::from_char(c).ok_or_else(|| AnalysisError::Pattern(format!("bad symbol {c:?}"))))
            .collect::<Result<_, _>>()?;
        Ok(SignPattern { symbols, zero_threshold: DEFAULT_ZERO_THRESHOLD })
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_ZERO_THRESHOLD: f64 = 0.05;

/// Thresholded signs of `v`, flipped so the first non-zero symbol is UP.
pub fn classify_sign_pattern(v: &[f64], eta: f64) -> Result<SignPattern, AnalysisError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(AnalysisError::Threshold(eta));
    }
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(max > 0.0) || !max.is_finite() {
        return Err(AnalysisError::DegenerateVector);
    }
    let cut = eta * max;
    let flip = v.iter().find(|x| x.abs() >= cut).is_some_and(|x| *x < 0.0);
    let symbols = v
        .iter()
        .map(|&x| {
            let x = if flip { -x } else { x };
            if x.abs() < cut {
                Symbol::Zero
            } else if x > 0.0 {
                Symbol::Up
            } else {
                Symbol::Down
            }
        })
        .collect();
    Ok(SignPattern { symbols, zero_threshold: eta })
}
