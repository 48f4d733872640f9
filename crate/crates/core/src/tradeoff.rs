//! Power–bandwidth trade-off between two schemes delivering the same rate
//! in bits per unit time, `C1 W1 = C2 W2`, with `snr = P / (N0 W)`.
//!
//! Scheme 1 is the baseline with coefficients `(c11, c21)` at `snr1`; scheme 2
//! has `(c12, c22)` and runs at `delta_p = P2/P1`, `delta_w = W2/W1`.

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::expansion::ExpansionCoeffs;

/// Bracket limits for the exact bandwidth ratio.
pub const MIN_DELTA_W: f64 = 1e-6;
pub const MAX_DELTA_W: f64 = 1e6;
/// Relative tolerance of the exact solver.
pub const EXACT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffQuery {
    pub baseline: ExpansionCoeffs,
    pub alternative: ExpansionCoeffs,
    pub snr1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub delta_p: f64,
    pub delta_w: f64,
}

impl TradeoffQuery {
    pub fn new(baseline: ExpansionCoeffs, alternative: ExpansionCoeffs, snr1: f64) -> Result<Self> {
        if !(snr1 > 0.0) || !snr1.is_finite() {
            return invalid(format!("baseline snr must be positive, got {snr1}"));
        }
        Ok(TradeoffQuery {
            baseline,
            alternative,
            snr1,
        })
    }

    /// `a = c22 snr1`.
    fn a(&self) -> f64 {
        self.alternative.c2 * self.snr1
    }

    /// `b = c11 + c21 snr1`.
    fn b(&self) -> f64 {
        self.baseline.c1 + self.baseline.c2 * self.snr1
    }

    /// Power ratio at which the approximate bandwidth ratio blows up.
    pub fn pole(&self) -> f64 {
        self.b() / self.alternative.c1
    }
}

/// Second-order approximation
/// `delta_w = c22 snr1 dp^2 / (c11 + c21 snr1 - c12 dp)`.
///
/// Fails with [`Error::Diverged`] when the result is not a positive finite
/// ratio. With both `c2 < 0` the valid branch is `dp` above the pole.
pub fn delta_w_approx(q: &TradeoffQuery, delta_p: f64) -> Result<f64> {
    if !(delta_p > 0.0) || !delta_p.is_finite() {
        return invalid(format!("power ratio must be positive, got {delta_p}"));
    }
    let den = q.b() - q.alternative.c1 * delta_p;
    let dw = q.a() * delta_p * delta_p / den;
    if den == 0.0 || !(dw > 0.0) || !dw.is_finite() {
        return Err(Error::Diverged {
            delta_p,
            pole: q.pole(),
        });
    }
    Ok(dw)
}

/// First-order-in-`snr1` inverse
/// `dp = c11/c12 + (c21/c12 - c22 c11^2 / (c12^3 dw)) snr1`.
pub fn delta_p_approx(q: &TradeoffQuery, delta_w: f64) -> Result<f64> {
    let (c11, c21) = (q.baseline.c1, q.baseline.c2);
    let (c12, c22) = (q.alternative.c1, q.alternative.c2);
    if c12 == 0.0 {
        return invalid("alternative scheme has c1 = 0");
    }
    if !(delta_w > 0.0) || !delta_w.is_finite() {
        return invalid(format!("bandwidth ratio must be positive, got {delta_w}"));
    }
    Ok(c11 / c12 + (c21 / c12 - c22 * c11 * c11 / (c12.powi(3) * delta_w)) * q.snr1)
}

/// Root of `a dp^2 + c12 dw dp - b dw = 0` on the branch that tends to
/// `b / c12` as `a -> 0`, evaluated without cancellation.
pub fn delta_p_exact_quadratic(q: &TradeoffQuery, delta_w: f64) -> Result<f64> {
    if !(delta_w > 0.0) || !delta_w.is_finite() {
        return invalid(format!("bandwidth ratio must be positive, got {delta_w}"));
    }
    let (a, b, c12) = (q.a(), q.b(), q.alternative.c1);
    let lin = c12 * delta_w;
    let disc = lin * lin + 4.0 * a * b * delta_w;
    if disc < 0.0 {
        return Err(Error::NoSolution(format!(
            "bandwidth ratio {delta_w} is below the minimum {} of the approximation",
            -4.0 * a * b / (c12 * c12)
        )));
    }
    let den = lin + disc.sqrt();
    let dp = 2.0 * b * delta_w / den;
    if den <= 0.0 || !(dp > 0.0) || !dp.is_finite() {
        return Err(Error::NoSolution("no positive power ratio".into()));
    }
    Ok(dp)
}

/// Exact trade-off: solves `dw C2(snr1 dp / dw) = C1(snr1)` for `dw`.
///
/// Capacities are in nats per channel use. Bisection runs on `log dw`;
/// `dw C2(k / dw)` increases with `dw` for any concave capacity curve, which is
/// checked while the bracket grows. A violation falls back to a grid scan.
pub fn exact_tradeoff<F1, F2>(cap1: F1, cap2: F2, snr1: f64, delta_p: f64) -> Result<f64>
where
    F1: Fn(f64) -> Result<f64>,
    F2: Fn(f64) -> Result<f64>,
{
    if !(snr1 > 0.0) || !snr1.is_finite() {
        return invalid(format!("baseline snr must be positive, got {snr1}"));
    }
    if !(delta_p > 0.0) || !delta_p.is_finite() {
        return invalid(format!("power ratio must be positive, got {delta_p}"));
    }
    let target = cap1(snr1)?;
    let excess = |log_w: f64| -> Result<f64> {
        let w = log_w.exp();
        Ok(w * cap2(snr1 * delta_p / w)? - target)
    };
    let (min, max) = (MIN_DELTA_W.ln(), MAX_DELTA_W.ln());
    let step = 4f64.ln();

    let g0 = excess(0.0)?;
    if g0 == 0.0 {
        return Ok(1.0);
    }
    let mut bracket = None;
    let mut monotone = true;
    if g0 < 0.0 {
        let (mut lo, mut g_lo) = (0.0, g0);
        while lo < max {
            let hi = (lo + step).min(max);
            let g_hi = excess(hi)?;
            if g_hi < g_lo {
                monotone = false;
                break;
            }
            if g_hi >= 0.0 {
                bracket = Some((lo, hi));
                break;
            }
            lo = hi;
            g_lo = g_hi;
        }
    } else {
        let (mut hi, mut g_hi) = (0.0, g0);
        while hi > min {
            let lo = (hi - step).max(min);
            let g_lo = excess(lo)?;
            if g_lo > g_hi {
                monotone = false;
                break;
            }
            if g_lo < 0.0 {
                bracket = Some((lo, hi));
                break;
            }
            hi = lo;
            g_hi = g_lo;
        }
    }
    if !monotone {
        bracket = scan_for_bracket(&excess, min, max)?;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::NoSolution(format!(
            "rate of the baseline is not reachable with delta_w in [{MIN_DELTA_W}, {MAX_DELTA_W}] at delta_p = {delta_p}"
        )));
    };
    // |log(hi/lo)| < tol implies the relative error of dw is below tol.
    while hi - lo > 0.1 * EXACT_REL_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

fn scan_for_bracket(
    excess: &impl Fn(f64) -> Result<f64>,
    min: f64,
    max: f64,
) -> Result<Option<(f64, f64)>> {
    const POINTS: usize = 241;
    let mut prev = (min, excess(min)?);
    for k in 1..POINTS {
        let x = min + (max - min) * k as f64 / (POINTS - 1) as f64;
        let g = excess(x)?;
        if prev.1 < 0.0 && g >= 0.0 {
            return Ok(Some((prev.0, x)));
        }
        prev = (x, g);
    }
    Ok(None)
}

/// Exact trade-off over a grid of power ratios, one result per input in order.
pub fn exact_tradeoff_curve<F1, F2>(
    exec: Execution,
    cap1: F1,
    cap2: F2,
    snr1: f64,
    delta_ps: &[f64],
) -> Vec<Result<f64>>
where
    F1: Fn(f64) -> Result<f64> + Sync + Send,
    F2: Fn(f64) -> Result<f64> + Sync + Send,
{
    exec.map(delta_ps, |&dp| exact_tradeoff(&cap1, &cap2, snr1, dp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMode {
    /// Same power: the bandwidth grows by `1 + 1/nu`.
    FixPower,
    /// Same bandwidth: the power grows by `1 - (c2/nu) snr`.
    FixBandwidth,
}

/// Cost of Nakagami-`nu` fading for a unit-energy scheme with unfaded `c1 = 1`.
pub fn nakagami_penalty(
    coeffs: ExpansionCoeffs,
    nu: f64,
    snr: f64,
    mode: PenaltyMode,
) -> Result<TradeoffPoint> {
    if coeffs.channel != crate::capacity::ChannelModel::Awgn {
        return invalid("penalty expects unfaded coefficients");
    }
    if (coeffs.c1 - 1.0).abs() > 1e-9 {
        return invalid(format!("penalty expects c1 = 1, got {}", coeffs.c1));
    }
    if !(nu > 0.0) {
        return invalid(format!("Nakagami parameter must be positive, got {nu}"));
    }
    if !(snr >= 0.0) || !snr.is_finite() {
        return invalid(format!("snr must be non-negative, got {snr}"));
    }
    let inv = 1.0 / nu;
    Ok(match mode {
        PenaltyMode::FixPower => TradeoffPoint {
            delta_p: 1.0,
            delta_w: 1.0 + inv,
        },
        PenaltyMode::FixBandwidth => TradeoffPoint {
            delta_p: 1.0 - coeffs.c2 * inv * snr,
            delta_w: 1.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{db_to_linear, linear_to_db};

    fn qpsk() -> ExpansionCoeffs {
        ExpansionCoeffs::awgn(1.0, -0.5)
    }

    fn qam16() -> ExpansionCoeffs {
        ExpansionCoeffs::awgn(0.8, -0.16)
    }

    #[test]
    fn same_scheme_unit_power_keeps_bandwidth() {
        let q = TradeoffQuery::new(qpsk(), qpsk(), 0.01).unwrap();
        assert!((delta_w_approx(&q, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((delta_p_approx(&q, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_first_order_gives_slope_ratio() {
        let other = ExpansionCoeffs::awgn(1.0, -0.8);
        let q = TradeoffQuery::new(qpsk(), other, 0.01).unwrap();
        let dw = delta_w_approx(&q, 1.0).unwrap();
        assert!((dw - (-0.8) / (-0.5)).abs() < 1e-12);
        // Unit bandwidth instead: dp = 1 + (c21 - c22) snr1.
        let dp = delta_p_approx(&q, 1.0).unwrap();
        assert!((dp - (1.0 + (-0.5 + 0.8) * 0.01)).abs() < 1e-15);
    }

    #[test]
    fn qpsk_to_16qam_pole() {
        let q = TradeoffQuery::new(qpsk(), qam16(), 1e-6).unwrap();
        assert!((linear_to_db(q.pole()) - 0.97).abs() < 5e-3);
        assert!(matches!(
            delta_w_approx(&q, 1.2),
            Err(Error::Diverged { .. })
        ));
        let near = delta_w_approx(&q, q.pole() * 1.0001).unwrap();
        let far = delta_w_approx(&q, q.pole() * 1.1).unwrap();
        assert!(near > 100.0 * far);
    }

    #[test]
    fn qpsk_to_16qam_delta_p_first_order() {
        let q = TradeoffQuery::new(qpsk(), qam16(), 0.01).unwrap();
        let expect = 1.25 + (-0.5 / 0.8 - (-0.16) / 0.8f64.powi(3)) * 0.01;
        assert!((delta_p_approx(&q, 1.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn quadratic_inverse_properties() {
        let q = TradeoffQuery::new(qpsk(), qam16(), db_to_linear(-18.0)).unwrap();
        for dw in [0.02, 0.1, 1.0, 10.0] {
            let dp = delta_p_exact_quadratic(&q, dw).unwrap();
            let back = delta_w_approx(&q, dp).unwrap();
            assert!((back - dw).abs() < 1e-9 * dw, "dw={dw} back={back}");
        }
        // a -> 0 reduces to the linear solution.
        let flat = TradeoffQuery::new(qpsk(), ExpansionCoeffs::awgn(0.8, 0.0), 0.01).unwrap();
        assert!((delta_p_exact_quadratic(&flat, 3.0).unwrap() - flat.pole()).abs() < 1e-15);
        // Below the minimum bandwidth of the approximation there is no root.
        assert!(matches!(
            delta_p_exact_quadratic(&q, 1e-4),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn quadratic_tracks_first_order_inverse() {
        for snr1 in [1e-4, 1e-3, 1e-2] {
            let q = TradeoffQuery::new(qpsk(), qam16(), snr1).unwrap();
            let exact = delta_p_exact_quadratic(&q, 1.0).unwrap();
            let approx = delta_p_approx(&q, 1.0).unwrap();
            assert!((exact - approx).abs() < 20.0 * snr1 * snr1, "snr1={snr1}");
        }
    }

    #[test]
    fn exact_solver_on_gaussian_capacities() {
        let log1p = |s: f64| Ok(s.ln_1p());
        assert!((exact_tradeoff(log1p, log1p, 0.01, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // Closed form check: w log(1 + k/w) = target, solved by bisection independently.
        let (snr1, dp) = (0.05, 1.3);
        let w = exact_tradeoff(log1p, log1p, snr1, dp).unwrap();
        let residual = w * (snr1 * dp / w).ln_1p() - snr1.ln_1p();
        assert!(residual.abs() < 1e-9);
        // Less power than the first-order limit cannot reach the rate.
        assert!(matches!(
            exact_tradeoff(log1p, log1p, 0.05, 0.9),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn exact_solver_survives_non_monotone_start() {
        // A capacity curve with a wiggle forces the scan fallback.
        let cap1 = |s: f64| Ok(s.ln_1p());
        let wiggly = |s: f64| Ok(s.ln_1p() * (1.0 + 0.3 * (40.0 * s).sin().powi(2)));
        let w = exact_tradeoff(cap1, wiggly, 0.05, 1.5).unwrap();
        let residual = w * wiggly(0.05 * 1.5 / w).unwrap() - 0.05f64.ln_1p();
        assert!(residual.abs() < 1e-8);
    }

    #[test]
    fn nakagami_penalties() {
        let p = nakagami_penalty(qpsk(), 1.0, 0.01, PenaltyMode::FixPower).unwrap();
        assert_eq!((p.delta_p, p.delta_w), (1.0, 2.0));
        let p = nakagami_penalty(qpsk(), 1.0, 0.01, PenaltyMode::FixBandwidth).unwrap();
        assert!((p.delta_p - 1.005).abs() < 1e-15 && p.delta_w == 1.0);
        assert!((linear_to_db(p.delta_p) - 0.0217).abs() < 5e-5);
        assert!((linear_to_db(p.delta_p) - (-4.343 * -0.5 * 0.01)).abs() < 1e-4);
        for mode in [PenaltyMode::FixPower, PenaltyMode::FixBandwidth] {
            let p = nakagami_penalty(qpsk(), f64::INFINITY, 0.01, mode).unwrap();
            assert_eq!((p.delta_p, p.delta_w), (1.0, 1.0));
        }
        assert!(nakagami_penalty(qpsk(), 0.0, 0.01, PenaltyMode::FixPower).is_err());
        assert!(nakagami_penalty(qam16(), 1.0, 0.01, PenaltyMode::FixPower).is_err());
    }
}
