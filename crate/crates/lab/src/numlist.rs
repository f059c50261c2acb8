//! Numeric list arguments: `5,6,7`, `5..12`, `0.5..1.5:5`, `99/98`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ListError {
    #[error("empty list")]
    Empty,
    #[error("cannot read `{0}` as a number")]
    Number(String),
    #[error("range `{0}` needs integer ends or an explicit `:count`")]
    Range(String),
    #[error("`{0}` is not a non-negative integer")]
    Integer(String),
}

/// A non-empty list of reals given on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NumList(pub Vec<f64>);

fn number(s: &str) -> Result<f64, ListError> {
    let bad = || ListError::Number(s.to_string());
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn range(item: &str, lo: &str, hi: &str) -> Result<Vec<f64>, ListError> {
    let (hi, count) = match hi.split_once(':') {
        Some((h, c)) => (h, Some(c.trim().parse::<usize>().map_err(|_| ListError::Range(item.to_string()))?)),
        None => (hi, None),
    };
    let (a, b) = (number(lo.trim())?, number(hi.trim())?);
    match count {
        Some(0) => Err(ListError::Range(item.to_string())),
        Some(1) => Ok(vec![a]),
        Some(k) => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
        None if a.fract() == 0.0 && b.fract() == 0.0 && a <= b => {
            Ok((a as i64..=b as i64).map(|i| i as f64).collect())
        }
        None => Err(ListError::Range(item.to_string())),
    }
}

impl FromStr for NumList {
    type Err = ListError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once("..") {
                Some((lo, hi)) => out.extend(range(item, lo, hi)?),
                None => out.push(number(item)?),
            }
        }
        if out.is_empty() {
            return Err(ListError::Empty);
        }
        Ok(NumList(out))
    }
}

impl fmt::Display for NumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl NumList {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// The entries as dimensions.
    pub fn as_u32(&self) -> Result<Vec<u32>, ListError> {
        self.0
            .iter()
            .map(|&v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                    Ok(v as u32)
                } else {
                    Err(ListError::Integer(v.to_string()))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_items() {
        let l: NumList = "5..7, 9, 99/98".parse().unwrap();
        assert_eq!(l.0[..4], [5.0, 6.0, 7.0, 9.0]);
        assert_eq!(l.0[4], 99.0 / 98.0);
        let l: NumList = "0.5..1.5:3".parse().unwrap();
        assert_eq!(l.0, [0.5, 1.0, 1.5]);
    }

    #[test]
    fn rejects_bad_items() {
        assert_eq!("".parse::<NumList>(), Err(ListError::Empty));
        assert!(matches!("0.5..1.5".parse::<NumList>(), Err(ListError::Range(_))));
        assert!(matches!("x".parse::<NumList>(), Err(ListError::Number(_))));
        assert!(matches!("1/0".parse::<NumList>(), Err(ListError::Number(_))));
        assert!("2.5".parse::<NumList>().unwrap().as_u32().is_err());
    }
}
