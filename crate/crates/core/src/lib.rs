//! Capacities of coded modulation (CM) and bit-interleaved coded modulation
//! (BICM) over AWGN and Nakagami fading, their low-SNR expansions
//! `C(snr) = c1 snr + c2 snr^2 + o(snr^2)`, and the power–bandwidth
//! trade-offs that follow from them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod constellation;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod quadrature;
pub mod tradeoff;
pub mod units;

pub use capacity::{
    bicm_capacity, bicm_capacity_direct, cm_capacity, gaussian_reference, CapacityEvaluator,
    CapacityValue, ChannelModel, EvalMethod,
};
pub use constellation::{
    make_pam, make_psk, make_qam, mixture, parse_constellation_json, Constellation,
    LabeledConstellation, Labeling,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use expansion::{
    apply_fading, bicm_coeffs, cm_coeffs, fit_coeffs_numeric, gray_c1, wideband_figures,
    ExpansionCoeffs, Slope, WidebandFigures,
};
pub use tradeoff::{
    delta_p_approx, delta_p_exact_quadratic, delta_w_approx, exact_tradeoff, nakagami_penalty,
    PenaltyMode, TradeoffPoint, TradeoffQuery,
};
