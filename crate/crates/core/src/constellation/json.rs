//! JSON constellation files.
//!
//! ```json
//! { "m": 2, "points": [[1, 0], [0, 1], [-1, 0], [0, -1]],
//!   "probs": [0.25, 0.25, 0.25, 0.25], "labels": ["00", "01", "11", "10"] }
//! ```
//!
//! `m`, `probs` and `labels` are optional. Probabilities default to uniform.
//! With labels present the result is a labeled constellation, which must be
//! equiprobable.

use serde::{Deserialize, Serialize};

use super::{ComplexScalar, Constellation, LabeledConstellation, PROB_SUM_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConstellation {
    Plain(Constellation),
    Labeled(LabeledConstellation),
}

impl ParsedConstellation {
    pub fn constellation(&self) -> &Constellation {
        match self {
            ParsedConstellation::Plain(c) => c,
            ParsedConstellation::Labeled(lc) => lc.base(),
        }
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

pub fn parse_constellation_json(text: &str) -> Result<ParsedConstellation> {
    let file: ConstellationFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.validate()
}

impl ConstellationFile {
    pub fn validate(&self) -> Result<ParsedConstellation> {
        let size = self.points.len();
        if size == 0 {
            return fail("'points' is empty");
        }
        if let Some(k) = self
            .points
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return fail(format!("point {k} is not finite"));
        }
        let points: Vec<ComplexScalar> = self
            .points
            .iter()
            .map(|p| ComplexScalar::new(p[0], p[1]))
            .collect();
        if let Some(probs) = &self.probs {
            if probs.len() != size {
                return fail(format!("{size} points but {} probabilities", probs.len()));
            }
        }
        if let Some(m) = self.m {
            if m == 0 || m >= 31 || size != 1usize << m {
                return fail(format!("m = {m} but there are {size} points"));
            }
        }

        let Some(labels) = &self.labels else {
            let probs = self
                .probs
                .clone()
                .unwrap_or_else(|| vec![1.0 / size as f64; size]);
            return Constellation::new(points, probs)
                .map(ParsedConstellation::Plain)
                .map_err(|e| Error::Format(e.to_string()));
        };

        if labels.len() != size {
            return fail(format!("{size} points but {} labels", labels.len()));
        }
        let width = labels[0].len();
        let mut values = Vec::with_capacity(size);
        for (k, s) in labels.iter().enumerate() {
            if s.len() != width || !s.chars().all(|ch| ch == '0' || ch == '1') {
                return fail(format!(
                    "label {k} ('{s}') is not a {width}-bit binary string"
                ));
            }
            values.push(u32::from_str_radix(s, 2).map_err(|e| Error::Format(e.to_string()))?);
        }
        if let Some(m) = self.m {
            if m as usize != width {
                return fail(format!("m = {m} but labels have {width} bits"));
            }
        }
        if width == 0 || width >= 31 || size != 1usize << width {
            return fail(format!("{size} points cannot carry {width}-bit labels"));
        }
        if let Some(probs) = &self.probs {
            let u = 1.0 / size as f64;
            if probs.iter().any(|p| (p - u).abs() > PROB_SUM_TOL) {
                return fail("labeled constellations must be equiprobable");
            }
        }
        LabeledConstellation::new(points, values)
            .map(ParsedConstellation::Labeled)
            .map_err(|e| Error::Format(e.to_string()))
    }
}

impl From<&LabeledConstellation> for ConstellationFile {
    fn from(lc: &LabeledConstellation) -> Self {
        ConstellationFile {
            m: Some(lc.bits()),
            points: lc.base().points().iter().map(|p| [p.re, p.im]).collect(),
            probs: None,
            labels: Some((0..lc.len()).map(|k| lc.label_string(k)).collect()),
        }
    }
}

impl From<&Constellation> for ConstellationFile {
    fn from(c: &Constellation) -> Self {
        ConstellationFile {
            m: None,
            points: c.points().iter().map(|p| [p.re, p.im]).collect(),
            probs: Some(c.probs().to_vec()),
            labels: None,
        }
    }
}
