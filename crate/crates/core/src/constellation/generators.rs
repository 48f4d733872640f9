use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{ComplexScalar, Constellation, LabeledConstellation, PROB_SUM_TOL};
use crate::error::{invalid, Error, Result};

/// Binary labeling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Labeling {
    /// Binary-reflected Gray code over the canonical geometric ordering.
    Gray,
    /// Ungerboeck set partitioning.
    SetPartitioning,
    /// QPSK only: antipodal points differ in a single bit, so two of the four
    /// neighbouring pairs differ in both bits.
    AntiGray,
}

impl Labeling {
    pub fn name(self) -> &'static str {
        match self {
            Labeling::Gray => "gray",
            Labeling::SetPartitioning => "sp",
            Labeling::AntiGray => "anti-gray",
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gray" | "gr" => Ok(Labeling::Gray),
            "sp" | "set-partitioning" | "set_partitioning" => Ok(Labeling::SetPartitioning),
            "anti-gray" | "anti_gray" | "antigray" | "a-gr" => Ok(Labeling::AntiGray),
            other => invalid(format!("unknown labeling '{other}'")),
        }
    }
}

fn binary_reflected_gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

fn log2_exact(size: usize, what: &str) -> Result<u32> {
    if size < 2 || !size.is_power_of_two() {
        return invalid(format!(
            "{what} size must be a power of two >= 2, got {size}"
        ));
    }
    Ok(size.trailing_zeros())
}

/// Unit-energy amplitudes `beta * (2k - M + 1)`, left to right.
fn pam_levels(size: usize) -> Vec<f64> {
    let m = size as f64;
    let beta = (3.0 / (m * m - 1.0)).sqrt();
    (0..size)
        .map(|k| beta * (2.0 * k as f64 - m + 1.0))
        .collect()
}

/// `M`-PAM on the real axis with binary-reflected Gray labels left to right.
pub fn make_pam(size: usize) -> Result<LabeledConstellation> {
    log2_exact(size, "PAM")?;
    let points = pam_levels(size)
        .into_iter()
        .map(|a| ComplexScalar::new(a, 0.0))
        .collect();
    let labels = (0..size as u32).map(binary_reflected_gray).collect();
    LabeledConstellation::new(points, labels)
}

/// `M`-PSK with points `exp(j 2 pi k / M)`, indexed counter-clockwise from angle 0.
///
/// Set partitioning is the natural binary labeling of the angular index;
/// anti-Gray is only defined for `M = 4`.
pub fn make_psk(size: usize, labeling: Labeling) -> Result<LabeledConstellation> {
    log2_exact(size, "PSK")?;
    let points = (0..size)
        .map(|k| ComplexScalar::from_polar(1.0, 2.0 * PI * k as f64 / size as f64))
        .collect();
    let labels = match labeling {
        Labeling::Gray => (0..size as u32).map(binary_reflected_gray).collect(),
        Labeling::SetPartitioning => (0..size as u32).collect(),
        Labeling::AntiGray if size == 4 => vec![0b00, 0b11, 0b01, 0b10],
        Labeling::AntiGray => return invalid("anti-Gray labeling is only defined for QPSK"),
    };
    LabeledConstellation::new(points, labels)
}

/// Ungerboeck four-level partition of 16-QAM, indexed `[re][im]` by the
/// per-axis amplitude index (0 = most negative). The least significant bit
/// splits the grid into two checkerboards, the next one into the four cosets
/// of the doubled lattice.
const SP16_LABELS: [[u32; 4]; 4] = [[0, 1, 8, 9], [11, 10, 3, 2], [12, 13, 4, 5], [7, 6, 15, 14]];

/// Square `M`-QAM built as the Cartesian product of two `sqrt(M)`-PAM
/// constellations, each carrying half of the unit energy.
///
/// Points are ordered row-major over (real index, imaginary index). Gray
/// labels concatenate the per-axis Gray labels with the real-axis bits first.
/// Set partitioning is available for 16-QAM.
pub fn make_qam(size: usize, labeling: Labeling) -> Result<LabeledConstellation> {
    let bits = log2_exact(size, "QAM")?;
    if bits % 2 != 0 {
        return invalid(format!("QAM size must be an even power of two, got {size}"));
    }
    let side = 1usize << (bits / 2);
    let axis_bits = bits / 2;
    let levels: Vec<f64> = pam_levels(side)
        .into_iter()
        .map(|a| a * std::f64::consts::FRAC_1_SQRT_2)
        .collect();

    let mut points = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for r in 0..side {
        for q in 0..side {
            points.push(ComplexScalar::new(levels[r], levels[q]));
            let label = match labeling {
                Labeling::Gray => {
                    (binary_reflected_gray(r as u32) << axis_bits) | binary_reflected_gray(q as u32)
                }
                Labeling::SetPartitioning if size == 16 => SP16_LABELS[r][q],
                Labeling::SetPartitioning => {
                    return invalid("set-partitioning QAM labeling is only tabulated for 16-QAM")
                }
                Labeling::AntiGray => {
                    return invalid("anti-Gray labeling is only defined for QPSK")
                }
            };
            labels.push(label);
        }
    }
    LabeledConstellation::new(points, labels)
}

/// Probability mixture of constellations: each point keeps its position and
/// receives probability `weight * p(point)`. Coincident points are merged.
pub fn mixture(parts: &[(Constellation, f64)]) -> Result<Constellation> {
    if parts.is_empty() {
        return invalid("mixture needs at least one component");
    }
    if let Some((_, w)) = parts.iter().find(|(_, w)| !(*w > 0.0) || !w.is_finite()) {
        return invalid(format!("mixture weights must be positive, got {w}"));
    }
    let total: f64 = parts.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return invalid(format!("mixture weights sum to {total}, not 1"));
    }
    let mut points = Vec::new();
    let mut probs = Vec::new();
    for (c, w) in parts {
        for (x, p) in c.iter() {
            points.push(x);
            probs.push(w * p);
        }
    }
    Constellation::new(points, probs)
}
