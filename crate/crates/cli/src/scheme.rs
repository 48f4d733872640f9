//! Constellation selectors: built-in `name[:labeling]` or a JSON file path.

use std::path::Path;

use bicm_core::constellation::ParsedConstellation;
use bicm_core::{
    apply_fading, bicm_coeffs, cm_coeffs, make_psk, make_qam, parse_constellation_json,
    CapacityEvaluator, CapacityValue, ChannelModel, Constellation, ExpansionCoeffs,
    LabeledConstellation, Labeling,
};

use crate::Failure;

pub const BUILT_IN: [&str; 5] = ["bpsk", "qpsk", "8psk", "16qam", "64qam"];

#[derive(Debug, Clone)]
pub enum SchemeKind {
    /// Coded modulation only.
    Plain(Constellation),
    Labeled(LabeledConstellation),
}

#[derive(Debug, Clone)]
pub struct Scheme {
    pub name: String,
    pub kind: SchemeKind,
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || s.contains('\\')
}

impl Scheme {
    pub fn parse(selector: &str) -> Result<Self, Failure> {
        if looks_like_path(selector) {
            return Self::from_file(Path::new(selector));
        }
        let (name, labeling) = match selector.split_once(':') {
            Some((n, l)) => (n, Some(l)),
            None => (selector, None),
        };
        let name = name.to_ascii_lowercase();
        let labeling = labeling
            .map(|l| l.parse::<Labeling>())
            .transpose()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let built = match name.as_str() {
            "bpsk" => make_psk(2, labeling.unwrap_or(Labeling::Gray)),
            "qpsk" => make_psk(4, labeling.unwrap_or(Labeling::Gray)),
            "8psk" => make_psk(8, labeling.unwrap_or(Labeling::Gray)),
            "16qam" => make_qam(16, labeling.unwrap_or(Labeling::Gray)),
            "64qam" => make_qam(64, labeling.unwrap_or(Labeling::Gray)),
            other => {
                return Err(Failure::Usage(format!(
                    "unknown constellation '{other}' (built-ins: {}; or a .json file)",
                    BUILT_IN.join(", ")
                )))
            }
        }
        .map_err(|e| Failure::Usage(format!("{selector}: {e}")))?;
        let kind = match labeling {
            Some(_) => SchemeKind::Labeled(built),
            None => SchemeKind::Plain(built.base().clone()),
        };
        Ok(Scheme {
            name: selector.to_ascii_lowercase(),
            kind,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
        let parsed = parse_constellation_json(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let kind = match parsed {
            ParsedConstellation::Plain(c) => SchemeKind::Plain(c),
            ParsedConstellation::Labeled(lc) => SchemeKind::Labeled(lc),
        };
        Ok(Scheme {
            name: path.display().to_string(),
            kind,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        match &self.kind {
            SchemeKind::Plain(c) => c,
            SchemeKind::Labeled(lc) => lc.base(),
        }
    }

    pub fn labeled(&self) -> Option<&LabeledConstellation> {
        match &self.kind {
            SchemeKind::Plain(_) => None,
            SchemeKind::Labeled(lc) => Some(lc),
        }
    }

    /// BICM coefficients for labeled schemes, CM otherwise, scaled for fading.
    pub fn coeffs(&self, channel: ChannelModel) -> bicm_core::Result<ExpansionCoeffs> {
        let awgn = match &self.kind {
            SchemeKind::Plain(c) => cm_coeffs(c),
            SchemeKind::Labeled(lc) => bicm_coeffs(lc)?,
        };
        match channel {
            ChannelModel::Awgn => Ok(awgn),
            ChannelModel::Nakagami(nu) => apply_fading(awgn, nu),
        }
    }

    /// BICM capacity for labeled schemes, CM otherwise.
    pub fn capacity(&self, eval: &CapacityEvaluator, snr: f64) -> bicm_core::Result<CapacityValue> {
        match &self.kind {
            SchemeKind::Plain(c) => eval.cm(c, snr),
            SchemeKind::Labeled(lc) => eval.bicm(lc, snr),
        }
    }
}

/// Groups selector tokens, attaching a bare labeling word to the preceding
/// name, so `qpsk gray 8psk sp` and `qpsk:gray 8psk:sp` are equivalent.
pub fn group_selectors(tokens: &[String]) -> Result<Vec<String>, Failure> {
    let mut out: Vec<String> = Vec::new();
    for token in tokens {
        if token.parse::<Labeling>().is_ok() && !looks_like_path(token) {
            match out.last_mut() {
                Some(prev) if !prev.contains(':') && !looks_like_path(prev) => {
                    prev.push(':');
                    prev.push_str(token);
                }
                _ => {
                    return Err(Failure::Usage(format!(
                        "labeling '{token}' does not follow a constellation name"
                    )))
                }
            }
        } else {
            out.push(token.clone());
        }
    }
    Ok(out)
}
