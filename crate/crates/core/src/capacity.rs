//! Coded-modulation and BICM capacities over AWGN and Nakagami fading.
//!
//! All capacities are in nats per channel use and `snr` is linear. The
//! channel is `y = h sqrt(snr) x + z` with unit-variance circular Gaussian
//! noise and fading known at the receiver, so only `chi = |h|^2` matters.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::constellation::{Constellation, LabeledConstellation};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::quadrature::{gamma_power_rule, gauss_hermite, GaussRule};

pub const DEFAULT_QUADRATURE_ORDER: usize = 32;
pub const DEFAULT_FADING_ORDER: usize = 64;
pub const MIN_QUADRATURE_ORDER: usize = 4;
pub const MIN_MC_SAMPLES: u64 = 1000;

/// Samples per Monte Carlo chunk. Each chunk owns one generator stream, so
/// the estimate does not depend on how chunks are scheduled.
const MC_CHUNK: u64 = 4096;

/// Noise nodes per quadrature work item.
const NOISE_BLOCK: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Awgn,
    /// Fully interleaved Nakagami-`nu` fading: `chi ~ Gamma(nu, 1/nu)`.
    Nakagami(f64),
}

impl ChannelModel {
    /// `nu = +inf` is the unfaded channel.
    pub fn nakagami(nu: f64) -> Result<Self> {
        if nu == f64::INFINITY {
            return Ok(ChannelModel::Awgn);
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return invalid(format!("Nakagami parameter must be positive, got {nu}"));
        }
        Ok(ChannelModel::Nakagami(nu))
    }

    /// `(E[chi], E[chi^2])`.
    pub fn fading_moments(&self) -> (f64, f64) {
        match *self {
            ChannelModel::Awgn => (1.0, 1.0),
            ChannelModel::Nakagami(nu) => (1.0, 1.0 + 1.0 / nu),
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelModel::Awgn => f.write_str("awgn"),
            ChannelModel::Nakagami(nu) => write!(f, "nakagami:{nu}"),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "awgn" {
            return Ok(ChannelModel::Awgn);
        }
        if let Some(nu) = s.strip_prefix("nakagami:") {
            let nu: f64 = nu
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad Nakagami parameter '{nu}'")))?;
            return ChannelModel::nakagami(nu);
        }
        if s == "rayleigh" {
            return Ok(ChannelModel::Nakagami(1.0));
        }
        invalid(format!(
            "unknown channel '{s}' (expected awgn or nakagami:<nu>)"
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    /// Product Gauss–Hermite over the noise (`order` nodes per real
    /// dimension) and Gauss–Laguerre over the fading power.
    Quadrature {
        order: usize,
        fading_order: usize,
    },
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

impl Default for EvalMethod {
    fn default() -> Self {
        EvalMethod::Quadrature {
            order: DEFAULT_QUADRATURE_ORDER,
            fading_order: DEFAULT_FADING_ORDER,
        }
    }
}

impl EvalMethod {
    pub fn quadrature(order: usize) -> Result<Self> {
        let m = EvalMethod::Quadrature {
            order,
            fading_order: DEFAULT_FADING_ORDER,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Result<Self> {
        let m = EvalMethod::MonteCarlo { samples, seed };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EvalMethod::Quadrature {
                order,
                fading_order,
            } => {
                if order < MIN_QUADRATURE_ORDER || fading_order < MIN_QUADRATURE_ORDER {
                    return invalid(format!(
                        "quadrature orders must be >= {MIN_QUADRATURE_ORDER}, got {order}/{fading_order}"
                    ));
                }
            }
            EvalMethod::MonteCarlo { samples, .. } => {
                if samples < MIN_MC_SAMPLES {
                    return invalid(format!(
                        "Monte Carlo needs >= {MIN_MC_SAMPLES} samples, got {samples}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Same method with a different seed; quadrature is returned unchanged.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            EvalMethod::MonteCarlo { samples, .. } => EvalMethod::MonteCarlo { samples, seed },
            q => q,
        }
    }
}

/// A capacity estimate in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityValue {
    /// Clamped to `[0, log M]`.
    pub nats: f64,
    /// Unclamped estimate.
    pub raw_nats: f64,
    /// Standard error of a Monte Carlo estimate; zero for quadrature.
    pub std_error: f64,
}

impl CapacityValue {
    fn new(raw: f64, std_error: f64, ceiling: f64) -> Self {
        CapacityValue {
            nats: raw.clamp(0.0, ceiling),
            raw_nats: raw,
            std_error,
        }
    }

    pub fn bits(&self) -> f64 {
        self.nats * std::f64::consts::LOG2_E
    }
}

/// `log(1 + snr)`, the capacity with Gaussian inputs.
pub fn gaussian_reference(snr: f64) -> Result<CapacityValue> {
    check_snr(snr)?;
    let c = snr.ln_1p();
    Ok(CapacityValue {
        nats: c,
        raw_nats: c,
        std_error: 0.0,
    })
}

pub fn cm_capacity(
    c: &Constellation,
    snr: f64,
    channel: ChannelModel,
    method: EvalMethod,
) -> Result<CapacityValue> {
    CapacityEvaluator::new(channel, method)?.cm(c, snr)
}

pub fn bicm_capacity(
    lc: &LabeledConstellation,
    snr: f64,
    channel: ChannelModel,
    method: EvalMethod,
) -> Result<CapacityValue> {
    CapacityEvaluator::new(channel, method)?.bicm(lc, snr)
}

pub fn bicm_capacity_direct(
    lc: &LabeledConstellation,
    snr: f64,
    channel: ChannelModel,
    method: EvalMethod,
) -> Result<CapacityValue> {
    CapacityEvaluator::new(channel, method)?.bicm_direct(lc, snr)
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr >= 0.0) || !snr.is_finite() {
        return invalid(format!("snr must be finite and non-negative, got {snr}"));
    }
    Ok(())
}

/// Reusable evaluator holding the quadrature rules for one channel and method.
#[derive(Debug, Clone)]
pub struct CapacityEvaluator {
    channel: ChannelModel,
    method: EvalMethod,
    exec: Execution,
    /// Complex noise nodes with product weights.
    noise: Vec<(Complex64, f64)>,
    /// Fading amplitudes `sqrt(chi)` with weights.
    fading: Vec<(f64, f64)>,
}

impl CapacityEvaluator {
    pub fn new(channel: ChannelModel, method: EvalMethod) -> Result<Self> {
        method.validate()?;
        let channel = match channel {
            ChannelModel::Nakagami(nu) => ChannelModel::nakagami(nu)?,
            ch => ch,
        };
        let (noise, fading) = match method {
            EvalMethod::Quadrature {
                order,
                fading_order,
            } => {
                let h = gauss_hermite(order)?;
                let mut noise = Vec::with_capacity(order * order);
                for (&tr, &wr) in h.nodes.iter().zip(&h.weights) {
                    for (&ti, &wi) in h.nodes.iter().zip(&h.weights) {
                        noise.push((Complex64::new(tr, ti), wr * wi));
                    }
                }
                let fading = match channel {
                    ChannelModel::Awgn => vec![(1.0, 1.0)],
                    ChannelModel::Nakagami(nu) => {
                        let GaussRule { nodes, weights } = gamma_power_rule(fading_order, nu)?;
                        nodes.into_iter().map(f64::sqrt).zip(weights).collect()
                    }
                };
                (noise, fading)
            }
            EvalMethod::MonteCarlo { .. } => (Vec::new(), Vec::new()),
        };
        Ok(CapacityEvaluator {
            channel,
            method,
            exec: Execution::default(),
            noise,
            fading,
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn channel(&self) -> ChannelModel {
        self.channel
    }

    pub fn method(&self) -> EvalMethod {
        self.method
    }

    /// Constrained capacity `-E[log sum_x' P(x') exp(-|h sqrt(snr)(X - x') + Z|^2 + |Z|^2)]`.
    pub fn cm(&self, c: &Constellation, snr: f64) -> Result<CapacityValue> {
        check_snr(snr)?;
        let ceiling = (c.len() as f64).ln();
        if snr == 0.0 {
            return Ok(CapacityValue::new(0.0, 0.0, ceiling));
        }
        let (mean, se) = self.expectation(snr, cm_integrand(c));
        Ok(CapacityValue::new(-mean, se, ceiling))
    }

    /// BICM capacity through the subset decomposition
    /// `sum_i 1/2 sum_b (C_X - C_{X_b^i})` with unnormalized subsets.
    pub fn bicm(&self, lc: &LabeledConstellation, snr: f64) -> Result<CapacityValue> {
        check_snr(snr)?;
        let m = lc.bits() as f64;
        let ceiling = m * std::f64::consts::LN_2;
        if snr == 0.0 {
            return Ok(CapacityValue::new(0.0, 0.0, ceiling));
        }
        // Terms are combined per noise sample so Monte Carlo errors partly
        // cancel and the standard error is that of the combined estimator.
        let full = cm_integrand(lc.base());
        let parts = (1..=lc.bits())
            .flat_map(|i| [(i, 0), (i, 1)])
            .map(|(i, b)| Ok(cm_integrand(&lc.subset(i, b)?)))
            .collect::<Result<Vec<_>>>()?;
        let sample = |z: Complex64, amp: f64| {
            m * full(z, amp) - 0.5 * parts.iter().map(|p| p(z, amp)).sum::<f64>()
        };
        let (mean, se) = self.expectation(snr, sample);
        Ok(CapacityValue::new(-mean, se, ceiling))
    }

    /// BICM capacity as the sum of per-bit mutual informations
    /// `sum_i E[log (sum_{x' in X_b^i} p(y|x') / (1/2 sum_{x'} p(y|x')))]`.
    pub fn bicm_direct(&self, lc: &LabeledConstellation, snr: f64) -> Result<CapacityValue> {
        check_snr(snr)?;
        let bits = lc.bits();
        let ceiling = bits as f64 * std::f64::consts::LN_2;
        if snr == 0.0 {
            return Ok(CapacityValue::new(0.0, 0.0, ceiling));
        }
        let points = lc.base().points();
        let size = points.len();
        let labels = lc.labels();
        let weight = 1.0 / size as f64;
        let sample = |z: Complex64, amp: f64| -> f64 {
            let mut exps = vec![0.0; size];
            let mut acc = 0.0;
            for (k, &x) in points.iter().enumerate() {
                for (e, &xp) in exps.iter_mut().zip(points) {
                    *e = exponent(amp * (x - xp), z);
                }
                let all = log_sum_exp(exps.iter().copied());
                for i in 0..bits {
                    let shift = bits - 1 - i;
                    let b = (labels[k] >> shift) & 1;
                    let same = log_sum_exp(
                        exps.iter()
                            .zip(labels)
                            .filter(|&(_, &l)| (l >> shift) & 1 == b)
                            .map(|(&e, _)| e),
                    );
                    acc += weight * (same - all + std::f64::consts::LN_2);
                }
            }
            acc
        };
        let (mean, se) = self.expectation(snr, sample);
        Ok(CapacityValue::new(mean, se, ceiling))
    }

    /// `E_{Z,H}[f(Z, |H| sqrt(snr))]` and its standard error.
    fn expectation<F>(&self, snr: f64, f: F) -> (f64, f64)
    where
        F: Fn(Complex64, f64) -> f64 + Sync + Send,
    {
        let root = snr.sqrt();
        match self.method {
            EvalMethod::Quadrature { .. } => {
                let blocks = self.noise.len().div_ceil(NOISE_BLOCK);
                let parts = self.exec.map_range(self.fading.len() * blocks, |idx| {
                    let (a, wa) = self.fading[idx / blocks];
                    let start = (idx % blocks) * NOISE_BLOCK;
                    let end = (start + NOISE_BLOCK).min(self.noise.len());
                    let amp = a * root;
                    wa * self.noise[start..end]
                        .iter()
                        .map(|&(z, wz)| wz * f(z, amp))
                        .sum::<f64>()
                });
                (parts.iter().sum(), 0.0)
            }
            EvalMethod::MonteCarlo { samples, seed } => {
                let chunks = samples.div_ceil(MC_CHUNK);
                let fading = match self.channel {
                    ChannelModel::Awgn => None,
                    ChannelModel::Nakagami(nu) => {
                        Some(Gamma::new(nu, 1.0 / nu).expect("validated Nakagami parameter"))
                    }
                };
                let parts = self.exec.map_range(chunks as usize, |chunk| {
                    let chunk = chunk as u64;
                    let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chunk);
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for _ in 0..n {
                        let (zr, zi) = draw_noise(&mut rng);
                        let chi = fading.map_or(1.0, |g| g.sample(&mut rng));
                        let v = f(Complex64::new(zr, zi), chi.sqrt() * root);
                        s1 += v;
                        s2 += v * v;
                    }
                    (s1, s2)
                });
                let (s1, s2) = parts
                    .iter()
                    .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
                let n = samples as f64;
                let mean = s1 / n;
                let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
                (mean, (var / n).sqrt())
            }
        }
    }
}

fn draw_noise<R: Rng>(rng: &mut R) -> (f64, f64) {
    let zr: f64 = rng.sample(StandardNormal);
    let zi: f64 = rng.sample(StandardNormal);
    (
        zr * std::f64::consts::FRAC_1_SQRT_2,
        zi * std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// `sum_x P(x) log sum_x' P(x') exp(-|amp (x - x') + z|^2 + |z|^2)`, whose
/// expectation is minus the constrained capacity.
fn cm_integrand(c: &Constellation) -> impl Fn(Complex64, f64) -> f64 + Sync + Send {
    let alphabet: Vec<(Complex64, f64)> = c
        .iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(x, p)| (x, p.ln()))
        .collect();
    move |z, amp| {
        alphabet
            .iter()
            .map(|&(x, lp)| lp.exp() * log_mixture(x, z, amp, &alphabet))
            .sum()
    }
}

/// `-|d + z|^2 + |z|^2` expanded so the large `|z|^2` terms cancel exactly.
#[inline]
fn exponent(d: Complex64, z: Complex64) -> f64 {
    -d.norm_sqr() - 2.0 * (d.re * z.re + d.im * z.im)
}

/// `log sum_x' P(x') exp(-|amp (x - x') + z|^2 + |z|^2)` for a log-probability alphabet.
fn log_mixture(x: Complex64, z: Complex64, amp: f64, alphabet: &[(Complex64, f64)]) -> f64 {
    log_sum_exp(
        alphabet
            .iter()
            .map(|&(xp, lp)| lp + exponent(amp * (x - xp), z)),
    )
}

/// Single-pass max-shifted log-sum-exp.
fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for t in terms {
        if t <= max {
            sum += (t - max).exp();
        } else {
            sum = sum * (max - t).exp() + 1.0;
            max = t;
        }
    }
    max + sum.ln()
}
