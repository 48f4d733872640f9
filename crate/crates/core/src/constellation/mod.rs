//! Finite complex signal constellations, their binary labelings and moments.

mod generators;
mod json;

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub use generators::{make_pam, make_psk, make_qam, mixture, Labeling};
pub use json::{parse_constellation_json, ConstellationFile, ParsedConstellation};

/// Signal-space coordinate of a single symbol.
pub type ComplexScalar = Complex64;

/// Points closer than this are treated as the same symbol.
pub const MERGE_DISTANCE: f64 = 1e-12;

/// Tolerance on the total probability mass.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A finite input alphabet with its probability mass function.
///
/// Immutable once built: every constructor validates the points and
/// probabilities and merges coincident points.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<ComplexScalar>,
    probs: Vec<f64>,
}

/// First moment, second moment and second-order pseudo-moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mu1: ComplexScalar,
    pub mu2: f64,
    pub mu2_pseudo: ComplexScalar,
}

/// Covariance of `(Re X, Im X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance2x2 {
    pub var_re: f64,
    pub var_im: f64,
    pub cov_re_im: f64,
}

impl Covariance2x2 {
    pub fn trace(&self) -> f64 {
        self.var_re + self.var_im
    }

    /// `Tr(cov^2)`.
    pub fn trace_of_square(&self) -> f64 {
        self.var_re * self.var_re
            + self.var_im * self.var_im
            + 2.0 * self.cov_re_im * self.cov_re_im
    }
}

impl Constellation {
    pub fn new(points: Vec<ComplexScalar>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("constellation must contain at least one point");
        }
        if points.len() != probs.len() {
            return invalid(format!(
                "{} points but {} probabilities",
                points.len(),
                probs.len()
            ));
        }
        if let Some(k) = points
            .iter()
            .position(|p| !p.re.is_finite() || !p.im.is_finite())
        {
            return invalid(format!("point {k} is not finite"));
        }
        if let Some(k) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return invalid(format!("probability {k} = {} outside [0, 1]", probs[k]));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }

        let mut merged_points: Vec<ComplexScalar> = Vec::with_capacity(points.len());
        let mut merged_probs: Vec<f64> = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(probs) {
            match merged_points
                .iter()
                .position(|q| (q - p).norm() <= MERGE_DISTANCE)
            {
                Some(k) => merged_probs[k] += w,
                None => {
                    merged_points.push(p);
                    merged_probs.push(w);
                }
            }
        }
        Ok(Constellation {
            points: merged_points,
            probs: merged_probs,
        })
    }

    /// Equiprobable constellation.
    pub fn uniform(points: Vec<ComplexScalar>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(points, vec![1.0 / n as f64; n])
    }

    pub fn points(&self) -> &[ComplexScalar] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ComplexScalar, f64)> + '_ {
        self.points.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn moments(&self) -> Moments {
        let mut mu1 = ComplexScalar::new(0.0, 0.0);
        let mut mu2 = 0.0;
        let mut mu2_pseudo = ComplexScalar::new(0.0, 0.0);
        for (x, p) in self.iter() {
            mu1 += x * p;
            mu2 += x.norm_sqr() * p;
            mu2_pseudo += x * x * p;
        }
        Moments {
            mu1,
            mu2,
            mu2_pseudo,
        }
    }

    pub fn covariance(&self) -> Covariance2x2 {
        let mean = self.moments().mu1;
        let mut cov = Covariance2x2 {
            var_re: 0.0,
            var_im: 0.0,
            cov_re_im: 0.0,
        };
        for (x, p) in self.iter() {
            let d = x - mean;
            cov.var_re += p * d.re * d.re;
            cov.var_im += p * d.im * d.im;
            cov.cov_re_im += p * d.re * d.im;
        }
        cov
    }

    pub fn is_zero_mean_unit_energy(&self, tol: f64) -> bool {
        let m = self.moments();
        m.mu1.norm() <= tol && (m.mu2 - 1.0).abs() <= tol
    }

    /// Multiplies every point by `exp(j theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = ComplexScalar::from_polar(1.0, theta);
        self.map_points(|x| x * r)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_points(|x| x * factor)
    }

    /// Shifts to zero mean and scales to unit energy.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.moments();
        let var = m.mu2 - m.mu1.norm_sqr();
        if var <= 0.0 {
            return invalid("cannot normalize a constellation with zero variance");
        }
        let s = var.sqrt().recip();
        Self::new(
            self.points.iter().map(|&x| (x - m.mu1) * s).collect(),
            self.probs.clone(),
        )
    }

    fn map_points(&self, f: impl Fn(ComplexScalar) -> ComplexScalar) -> Self {
        // Rotations and non-zero scalings preserve distinctness.
        Constellation {
            points: self.points.iter().map(|&x| f(x)).collect(),
            probs: self.probs.clone(),
        }
    }
}

/// An equiprobable constellation of `2^m` points with a bijective `m`-bit labeling.
///
/// Bit position `i` runs from 1 (most significant, leftmost character of the
/// label string) to `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledConstellation {
    base: Constellation,
    bits: u32,
    labels: Vec<u32>,
}

impl LabeledConstellation {
    pub fn new(points: Vec<ComplexScalar>, labels: Vec<u32>) -> Result<Self> {
        let size = points.len();
        if size < 2 || !size.is_power_of_two() {
            return invalid(format!(
                "labeled constellation needs 2^m points with m >= 1, got {size}"
            ));
        }
        if labels.len() != size {
            return invalid(format!("{size} points but {} labels", labels.len()));
        }
        let bits = size.trailing_zeros();
        let mut seen = vec![false; size];
        for &l in &labels {
            let slot = seen.get_mut(l as usize);
            match slot {
                Some(s) if !*s => *s = true,
                Some(_) => return invalid(format!("label {l} used twice")),
                None => return invalid(format!("label {l} does not fit in {bits} bits")),
            }
        }
        let base = Constellation::uniform(points)?;
        if base.len() != size {
            return invalid("labeled constellation has coincident points");
        }
        Ok(LabeledConstellation { base, bits, labels })
    }

    pub fn base(&self) -> &Constellation {
        &self.base
    }

    /// Number of label bits `m`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label_string(&self, k: usize) -> String {
        format!("{:0width$b}", self.labels[k], width = self.bits as usize)
    }

    /// Value of bit `i` (1-based, MSB first) of the label of point `k`.
    pub fn bit(&self, k: usize, i: u32) -> u32 {
        (self.labels[k] >> (self.bits - i)) & 1
    }

    /// The half-constellation `X_b^i`: points whose label has bit `b` at
    /// position `i`, each with probability `2/M`. Not renormalized.
    pub fn subset(&self, i: u32, b: u32) -> Result<Constellation> {
        if i == 0 || i > self.bits {
            return invalid(format!("bit index {i} outside 1..={}", self.bits));
        }
        if b > 1 {
            return invalid(format!("bit value must be 0 or 1, got {b}"));
        }
        let pts = (0..self.len())
            .filter(|&k| self.bit(k, i) == b)
            .map(|k| self.base.points[k])
            .collect();
        Constellation::uniform(pts)
    }

    /// Relabels so that new bit position `j + 1` carries old bit position `perm[j] + 1`.
    pub fn permute_bits(&self, perm: &[usize]) -> Result<Self> {
        let m = self.bits as usize;
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..m).collect::<Vec<_>>() {
            return invalid("bit permutation must be a permutation of 0..m");
        }
        let labels = (0..self.len())
            .map(|k| {
                perm.iter()
                    .fold(0u32, |acc, &old| (acc << 1) | self.bit(k, old as u32 + 1))
            })
            .collect();
        Self::new(self.base.points.clone(), labels)
    }

    pub fn rotated(&self, theta: f64) -> Self {
        LabeledConstellation {
            base: self.base.rotated(theta),
            bits: self.bits,
            labels: self.labels.clone(),
        }
    }
}
