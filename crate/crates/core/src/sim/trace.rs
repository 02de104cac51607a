//! Scripted traces: explicit generation times and service durations.
//!
//! Text format, one packet per line:
//!
//! ```text
//! # generation_time service_duration
//! 1.0  1.0
//! 3.0, 4.0
//! ```
//!
//! Fields are separated by whitespace or a comma. Blank lines and `#`
//! comments are ignored. Generation times must be nondecreasing.

use std::str::FromStr;

use crate::error::{PudError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    packets: Vec<(f64, f64)>,
}

impl Script {
    pub fn new(packets: Vec<(f64, f64)>) -> Result<Self> {
        let mut last = 0.0f64;
        for (i, &(t, s)) in packets.iter().enumerate() {
            if !(t.is_finite() && t >= 0.0) {
                return Err(PudError::Argument(format!("packet {i}: bad generation time {t}")));
            }
            if t < last {
                return Err(PudError::Argument(format!("packet {i}: generation time {t} precedes previous {last}")));
            }
            if !(s.is_finite() && s >= 0.0) {
                return Err(PudError::Argument(format!("packet {i}: bad service duration {s}")));
            }
            last = t;
        }
        Ok(Self { packets })
    }

    pub fn packets(&self) -> &[(f64, f64)] {
        &self.packets
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

impl FromStr for Script {
    type Err = PudError;

    fn from_str(text: &str) -> Result<Self> {
        let mut packets = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
            let bad = |reason: &str| PudError::Parse {
                input: raw.to_string(),
                reason: format!("line {}: {reason}", lineno + 1),
            };
            if fields.len() != 2 {
                return Err(bad("expected two fields"));
            }
            let t: f64 = fields[0].parse().map_err(|_| bad("generation time is not a number"))?;
            let s: f64 = fields[1].parse().map_err(|_| bad("service duration is not a number"))?;
            packets.push((t, s));
        }
        Script::new(packets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_separators() {
        let s: Script = "# header\n1.0 1.0\n\n3.0, 4.0  # trailing\n4\t0\n".parse().unwrap();
        assert_eq!(s.packets(), &[(1.0, 1.0), (3.0, 4.0), (4.0, 0.0)]);
    }

    #[test]
    fn rejects_bad_scripts() {
        assert!("2.0 1.0\n1.0 1.0".parse::<Script>().is_err());
        assert!("1.0".parse::<Script>().is_err());
        assert!("1.0 x".parse::<Script>().is_err());
        assert!("1.0 -1".parse::<Script>().is_err());
        assert!(Script::new(vec![(f64::NAN, 1.0)]).is_err());
    }
}
