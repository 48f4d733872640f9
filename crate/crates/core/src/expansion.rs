//! Low-SNR expansion `C(snr) = c1 snr + c2 snr^2 + o(snr^2)` of CM and BICM
//! capacities and the wideband figures derived from it.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};

use crate::capacity::ChannelModel;
use crate::constellation::{Constellation, LabeledConstellation};
use crate::error::{invalid, Result};
use crate::units::linear_to_db;

/// Tolerance on zero mean and unit energy for the BICM closed form.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Below this magnitude `c2` is treated as zero and the slope is unbounded.
pub const ZERO_C2: f64 = 1e-15;

/// First two Taylor coefficients (nats per channel use) and the channel they refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub channel: ChannelModel,
}

impl ExpansionCoeffs {
    pub fn awgn(c1: f64, c2: f64) -> Self {
        ExpansionCoeffs {
            c1,
            c2,
            channel: ChannelModel::Awgn,
        }
    }
}

/// Wideband slope in bits per channel use per unit of linear Eb/N0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Finite(f64),
    /// `c2 = 0`.
    Unbounded,
}

impl Slope {
    pub fn finite(self) -> Option<f64> {
        match self {
            Slope::Finite(v) => Some(v),
            Slope::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidebandFigures {
    pub ebno_lim_linear: f64,
    pub ebno_lim_db: f64,
    pub slope_zeta0: Slope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrayFamily {
    Pam,
    /// `M^2`-QAM built from two `M`-PAM axes.
    QamOfSquare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayLimit {
    pub c1: f64,
    pub ebno_lim_linear: f64,
}

/// Coefficients of the constrained capacity of any finite constellation:
/// `c1 = mu2 - |mu1|^2`, `c2 = -((mu2 - |mu1|^2)^2 + |mu2' - mu1^2|^2) / 2`.
pub fn cm_coeffs(c: &Constellation) -> ExpansionCoeffs {
    let m = c.moments();
    let var = m.mu2 - m.mu1.norm_sqr();
    let pseudo = (m.mu2_pseudo - m.mu1 * m.mu1).norm_sqr();
    ExpansionCoeffs::awgn(var, -0.5 * (var * var + pseudo))
}

/// Coefficients of the BICM capacity of a zero-mean, unit-energy labeled constellation.
pub fn bicm_coeffs(lc: &LabeledConstellation) -> Result<ExpansionCoeffs> {
    let whole = lc.base().moments();
    if whole.mu1.norm() > NORMALIZATION_TOL || (whole.mu2 - 1.0).abs() > NORMALIZATION_TOL {
        return invalid(format!(
            "BICM expansion needs zero mean and unit energy (|mu1| = {:.3e}, mu2 = {})",
            whole.mu1.norm(),
            whole.mu2
        ));
    }
    let reference = 1.0 + whole.mu2_pseudo.norm_sqr();
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    for i in 1..=lc.bits() {
        for b in 0..2 {
            let s = lc.subset(i, b)?.moments();
            let mean_sq = s.mu1.norm_sqr();
            let var = s.mu2 - mean_sq;
            let pseudo = (s.mu2_pseudo - s.mu1 * s.mu1).norm_sqr();
            c1 += 0.5 * mean_sq;
            c2 += 0.25 * (var * var - reference + pseudo);
        }
    }
    Ok(ExpansionCoeffs::awgn(c1, c2))
}

/// Closed-form `c1 = 3 M^2 / (4 (M^2 - 1))` of Gray-labeled `M`-PAM, which
/// `M^2`-QAM shares.
pub fn gray_c1(levels: usize, _family: GrayFamily) -> Result<GrayLimit> {
    if levels < 2 || !levels.is_power_of_two() {
        return invalid(format!(
            "PAM size must be a power of two >= 2, got {levels}"
        ));
    }
    let m2 = (levels * levels) as f64;
    let c1 = 3.0 * m2 / (4.0 * (m2 - 1.0));
    Ok(GrayLimit {
        c1,
        ebno_lim_linear: 4.0 * (m2 - 1.0) * LN_2 / (3.0 * m2),
    })
}

/// Scales unfaded coefficients to Nakagami-`nu`: `c1 E[chi]`, `c2 E[chi^2]`.
pub fn apply_fading(coeffs: ExpansionCoeffs, nu: f64) -> Result<ExpansionCoeffs> {
    if coeffs.channel != ChannelModel::Awgn {
        return invalid("fading can only be applied to unfaded coefficients");
    }
    let channel = ChannelModel::nakagami(nu)?;
    let (m1, m2) = channel.fading_moments();
    Ok(ExpansionCoeffs {
        c1: m1 * coeffs.c1,
        c2: m2 * coeffs.c2,
        channel,
    })
}

pub fn wideband_figures(coeffs: ExpansionCoeffs) -> Result<WidebandFigures> {
    if !(coeffs.c1 > 0.0) {
        return invalid(format!("c1 must be positive, got {}", coeffs.c1));
    }
    let ebno = LN_2 / coeffs.c1;
    let slope = if coeffs.c2.abs() <= ZERO_C2 {
        Slope::Unbounded
    } else {
        Slope::Finite(-coeffs.c1.powi(3) / (coeffs.c2 * LN_2 * LN_2))
    };
    Ok(WidebandFigures {
        ebno_lim_linear: ebno,
        ebno_lim_db: linear_to_db(ebno),
        slope_zeta0: slope,
    })
}

/// Truncated series `c1 snr + c2 snr^2` in nats.
pub fn capacity_series(coeffs: ExpansionCoeffs, snr: f64) -> f64 {
    coeffs.c1 * snr + coeffs.c2 * snr * snr
}

/// First-order capacity in bits per channel use around the zero-rate
/// Eb/N0: `zeta0 (ebno - ebno_lim)`. Negative below the limit.
pub fn linear_ebno_approx(coeffs: ExpansionCoeffs, ebno_linear: f64) -> Result<f64> {
    if !(ebno_linear > 0.0) {
        return invalid(format!("Eb/N0 must be positive, got {ebno_linear}"));
    }
    let fig = wideband_figures(coeffs)?;
    match fig.slope_zeta0 {
        Slope::Finite(z) => Ok(z * (ebno_linear - fig.ebno_lim_linear)),
        Slope::Unbounded => invalid("wideband slope is unbounded (c2 = 0)"),
    }
}

/// Eight log-spaced points in `[1e-3, 3e-2]`.
pub fn default_fit_grid() -> Vec<f64> {
    let (lo, hi): (f64, f64) = (1e-3, 3e-2);
    let n = 8;
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Polynomial terms beyond `snr^2` absorbed by the fit so that the
/// truncation bias stays below the recovered `c2` accuracy.
pub const FIT_NUISANCE_TERMS: usize = 2;

/// Least-squares estimate of `(c1, c2)` from capacity samples on a low-SNR grid.
///
/// Fits `C(snr)/snr = c1 + c2 snr + c3 snr^2 + ...` with the higher terms
/// as nuisance parameters.
pub fn fit_coeffs_numeric<F>(
    capacity: F,
    grid: &[f64],
    channel: ChannelModel,
) -> Result<ExpansionCoeffs>
where
    F: Fn(f64) -> Result<f64>,
{
    if grid.len() < 4 {
        return invalid(format!(
            "fit grid needs at least 4 points, got {}",
            grid.len()
        ));
    }
    if let Some(s) = grid.iter().find(|&&s| !(s > 0.0 && s <= 0.05)) {
        return invalid(format!("fit grid point {s} outside (0, 0.05]"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * w[1]) {
        return invalid("fit grid has repeated points");
    }

    let terms = (2 + FIT_NUISANCE_TERMS).min(grid.len());
    let scale = sorted[sorted.len() - 1];
    let rows = grid.len();
    let design = DMatrix::from_fn(rows, terms, |r, k| (grid[r] / scale).powi(k as i32));
    let mut rhs = DVector::zeros(rows);
    for (r, &s) in grid.iter().enumerate() {
        rhs[r] = capacity(s)? / s;
    }
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| crate::error::Error::InvalidArgument(e.to_string()))?;
    Ok(ExpansionCoeffs {
        c1: sol[0],
        c2: sol[1] / scale,
        channel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_pam, make_psk, make_qam, ComplexScalar, Labeling};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cm_coeffs_examples() {
        let q = cm_coeffs(make_psk(4, Labeling::Gray).unwrap().base());
        assert!(close(q.c1, 1.0, 1e-15) && close(q.c2, -0.5, 1e-15));
        let b = cm_coeffs(make_psk(2, Labeling::Gray).unwrap().base());
        assert!(close(b.c1, 1.0, 1e-15) && close(b.c2, -1.0, 1e-15));
        let shifted = Constellation::uniform(vec![
            ComplexScalar::new(0.0, 0.0),
            ComplexScalar::new(2.0, 0.0),
        ])
        .unwrap();
        let s = cm_coeffs(&shifted);
        assert!(close(s.c1, 1.0, 1e-15) && close(s.c2, -1.0, 1e-15));
    }

    #[test]
    fn bicm_coeffs_examples() {
        let q = bicm_coeffs(&make_psk(4, Labeling::Gray).unwrap()).unwrap();
        assert!(close(q.c1, 1.0, 1e-12) && close(q.c2, -0.5, 1e-12));
        let sp8 = bicm_coeffs(&make_psk(8, Labeling::SetPartitioning).unwrap()).unwrap();
        assert!(close(sp8.c1, 0.427, 5e-4) && close(sp8.c2, 0.005, 5e-4));
        let g16 = bicm_coeffs(&make_qam(16, Labeling::Gray).unwrap()).unwrap();
        assert!(close(g16.c1, 0.8, 1e-12) && close(g16.c2, -0.16, 1e-12));
    }

    #[test]
    fn bicm_coeffs_requires_normalization() {
        let lc = make_psk(4, Labeling::Gray).unwrap();
        let scaled = LabeledConstellation::new(
            lc.base().points().iter().map(|p| p * 2.0).collect(),
            lc.labels().to_vec(),
        )
        .unwrap();
        assert!(bicm_coeffs(&scaled).is_err());
    }

    #[test]
    fn gray_closed_form() {
        assert!(close(gray_c1(2, GrayFamily::Pam).unwrap().c1, 1.0, 1e-15));
        assert!(close(
            gray_c1(4, GrayFamily::QamOfSquare).unwrap().c1,
            0.8,
            1e-15
        ));
        let big = gray_c1(1 << 12, GrayFamily::Pam).unwrap().ebno_lim_linear;
        assert!(big < 4.0 / 3.0 * LN_2);
        assert!(close(linear_to_db(4.0 / 3.0 * LN_2), -0.3424, 5e-5));
        assert!(gray_c1(3, GrayFamily::Pam).is_err());
        for m in [2, 4, 8, 16, 32] {
            let direct = bicm_coeffs(&make_pam(m).unwrap()).unwrap().c1;
            assert!(close(
                gray_c1(m, GrayFamily::Pam).unwrap().c1,
                direct,
                1e-12
            ));
        }
    }

    #[test]
    fn fading_scaling() {
        let q = ExpansionCoeffs::awgn(1.0, -0.5);
        let r = apply_fading(q, 1.0).unwrap();
        assert!(close(r.c1, 1.0, 0.0) && close(r.c2, -1.0, 1e-15));
        assert_eq!(r.channel, ChannelModel::Nakagami(1.0));
        let inf = apply_fading(q, f64::INFINITY).unwrap();
        assert_eq!((inf.c1, inf.c2), (1.0, -0.5));
        let g = apply_fading(ExpansionCoeffs::awgn(0.8, -0.16), 0.3).unwrap();
        assert!(close(g.c2, -0.16 * (1.0 + 1.0 / 0.3), 1e-15));
        assert!(close(g.c2, -0.6933, 5e-5));
        assert!(apply_fading(q, 0.0).is_err());
        assert!(apply_fading(r, 2.0).is_err());
    }

    #[test]
    fn wideband_figures_examples() {
        let f = wideband_figures(ExpansionCoeffs::awgn(1.0, -0.5)).unwrap();
        assert!(close(f.ebno_lim_linear, 0.693, 5e-4));
        assert!(close(f.ebno_lim_db, -1.592, 5e-4));
        assert!(close(f.slope_zeta0.finite().unwrap(), 4.163, 5e-4));
        let sp16 = wideband_figures(ExpansionCoeffs::awgn(0.5, -0.31)).unwrap();
        assert!(close(sp16.ebno_lim_db, 1.419, 5e-4));
        assert!(close(sp16.slope_zeta0.finite().unwrap(), 0.839, 5e-4));
        let flat = wideband_figures(ExpansionCoeffs::awgn(1.0, 0.0)).unwrap();
        assert_eq!(flat.slope_zeta0, Slope::Unbounded);
        assert!(wideband_figures(ExpansionCoeffs::awgn(0.0, -0.5)).is_err());
    }

    #[test]
    fn slope_sign_opposes_c2() {
        for c2 in [-0.7, -0.01, 0.002, 0.3] {
            let z = wideband_figures(ExpansionCoeffs::awgn(0.6, c2))
                .unwrap()
                .slope_zeta0
                .finite()
                .unwrap();
            assert_eq!(z.signum(), -c2.signum());
        }
    }

    #[test]
    fn series_and_linear_approximation() {
        let q = ExpansionCoeffs::awgn(1.0, -0.5);
        assert_eq!(capacity_series(q, 0.0), 0.0);
        assert!(close(capacity_series(q, 0.01), 0.00995, 1e-15));
        assert!(close(
            capacity_series(ExpansionCoeffs::awgn(0.8, -0.16), 0.01),
            0.007984,
            1e-15
        ));
        assert!(close(linear_ebno_approx(q, LN_2).unwrap(), 0.0, 1e-15));
        assert!(close(linear_ebno_approx(q, 0.793).unwrap(), 0.4163, 1e-3));
        assert!(linear_ebno_approx(q, 0.0).is_err());
        assert!(linear_ebno_approx(ExpansionCoeffs::awgn(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn fit_recovers_log1p() {
        let fit =
            fit_coeffs_numeric(|s| Ok(s.ln_1p()), &default_fit_grid(), ChannelModel::Awgn).unwrap();
        assert!(close(fit.c1, 1.0, 1e-6), "{fit:?}");
        assert!(close(fit.c2, -0.5, 1e-4), "{fit:?}");
    }

    #[test]
    fn fit_rejects_degenerate_grids() {
        let f = |s: f64| Ok(s);
        assert!(fit_coeffs_numeric(f, &[0.01, 0.02, 0.03], ChannelModel::Awgn).is_err());
        assert!(fit_coeffs_numeric(f, &[0.01, 0.02, 0.03, 0.1], ChannelModel::Awgn).is_err());
        assert!(fit_coeffs_numeric(f, &[0.0, 0.02, 0.03, 0.04], ChannelModel::Awgn).is_err());
        assert!(fit_coeffs_numeric(f, &[0.01, 0.01, 0.03, 0.04], ChannelModel::Awgn).is_err());
    }
}
