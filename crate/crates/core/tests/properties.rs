use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use bicm_core::{
    bicm_capacity, bicm_coeffs, cm_capacity, cm_coeffs, make_psk, make_qam, ChannelModel,
    Constellation, EvalMethod, ExpansionCoeffs, LabeledConstellation, Labeling,
};

fn table_one() -> Vec<LabeledConstellation> {
    vec![
        make_psk(4, Labeling::Gray).unwrap(),
        make_psk(4, Labeling::AntiGray).unwrap(),
        make_psk(8, Labeling::Gray).unwrap(),
        make_psk(8, Labeling::SetPartitioning).unwrap(),
        make_qam(16, Labeling::Gray).unwrap(),
        make_qam(16, Labeling::SetPartitioning).unwrap(),
    ]
}

fn arb_constellation() -> impl Strategy<Value = Constellation> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.05f64..1.0), 1..9).prop_map(|raw| {
        let total: f64 = raw.iter().map(|r| r.2).sum();
        let points = raw.iter().map(|r| Complex64::new(r.0, r.1)).collect();
        let probs = raw.iter().map(|r| r.2 / total).collect();
        Constellation::new(points, probs).unwrap()
    })
}

/// Random zero-mean unit-energy point set of size 4 or 8 with a random labeling.
fn arb_labeled() -> impl Strategy<Value = LabeledConstellation> {
    prop_oneof![Just(2u32), Just(3u32)]
        .prop_flat_map(|m| {
            let size = 1usize << m;
            (
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), size),
                Just((0..size as u32).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_filter_map("distinct points", |(raw, labels)| {
            let points: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let base = Constellation::uniform(points).ok()?;
            if base.len() != labels.len()
                || base.moments().mu2 - base.moments().mu1.norm_sqr() < 1e-3
            {
                return None;
            }
            let normalized = base.normalized().ok()?;
            let mut pts = normalized.points().to_vec();
            // Keep the pairing with labels stable: uniform construction preserves order.
            pts.truncate(labels.len());
            LabeledConstellation::new(pts, labels).ok()
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coefficients_equal_covariance_trace_forms(c in arb_constellation()) {
        let k = cm_coeffs(&c);
        let cov = c.covariance();
        prop_assert!(close(k.c1, cov.trace(), 1e-12));
        prop_assert!(close(k.c2, -cov.trace_of_square(), 1e-12));
    }

    #[test]
    fn moments_obey_cauchy_schwarz(c in arb_constellation()) {
        let m = c.moments();
        prop_assert!(m.mu1.norm_sqr() <= m.mu2 * (1.0 + 1e-12));
        prop_assert!(m.mu2_pseudo.norm() <= m.mu2 * (1.0 + 1e-12));
        let cov = c.covariance();
        prop_assert!(cov.var_re >= -1e-15 && cov.var_im >= -1e-15);
        prop_assert!(cov.var_re * cov.var_im >= cov.cov_re_im.powi(2) - 1e-12);
    }

    #[test]
    fn rotation_covariance_of_moments(c in arb_constellation(), theta in -PI..PI) {
        let (m, r) = (c.moments(), c.rotated(theta).moments());
        let phase = Complex64::from_polar(1.0, theta);
        prop_assert!(close(r.mu2, m.mu2, 1e-12));
        prop_assert!((r.mu1 - m.mu1 * phase).norm() < 1e-12);
        prop_assert!((r.mu2_pseudo - m.mu2_pseudo * phase * phase).norm() < 1e-12);
    }

    #[test]
    fn coefficients_are_rotation_invariant(lc in arb_labeled(), theta in -PI..PI) {
        let rot = lc.rotated(theta);
        let (a, b) = (cm_coeffs(lc.base()), cm_coeffs(rot.base()));
        prop_assert!(close(a.c1, b.c1, 1e-12) && close(a.c2, b.c2, 1e-12));
        let (a, b) = (bicm_coeffs(&lc).unwrap(), bicm_coeffs(&rot).unwrap());
        prop_assert!(close(a.c1, b.c1, 1e-12) && close(a.c2, b.c2, 1e-12));
    }

    #[test]
    fn bicm_coefficients_decompose_over_subsets(lc in arb_labeled()) {
        let whole = cm_coeffs(lc.base());
        let mut sum = ExpansionCoeffs::awgn(0.0, 0.0);
        for i in 1..=lc.bits() {
            for b in 0..2 {
                let part = cm_coeffs(&lc.subset(i, b).unwrap());
                sum.c1 += 0.5 * (whole.c1 - part.c1);
                sum.c2 += 0.5 * (whole.c2 - part.c2);
            }
        }
        let k = bicm_coeffs(&lc).unwrap();
        prop_assert!(close(k.c1, sum.c1, 1e-12), "{} vs {}", k.c1, sum.c1);
        prop_assert!(close(k.c2, sum.c2, 1e-12), "{} vs {}", k.c2, sum.c2);
        prop_assert!(k.c1 >= -1e-15 && k.c1 <= 1.0 + 1e-12);
    }

    #[test]
    fn normalized_cm_second_order_is_bounded(c in arb_constellation()) {
        prop_assume!(c.len() > 1 && c.covariance().trace() > 1e-3);
        let k = cm_coeffs(&c.normalized().unwrap());
        prop_assert!(close(k.c1, 1.0, 1e-12));
        prop_assert!(k.c2 <= -0.5 + 1e-12 && k.c2 >= -1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn capacity_is_monotone_and_bounded(c in arb_constellation(), s1 in 0.0f64..5.0, s2 in 0.0f64..5.0) {
        prop_assume!(c.len() > 1 && c.covariance().trace() > 1e-3);
        let c = c.normalized().unwrap();
        let (lo, hi) = (s1.min(s2), s1.max(s2));
        let m = EvalMethod::quadrature(24).unwrap();
        let a = cm_capacity(&c, lo, ChannelModel::Awgn, m).unwrap().raw_nats;
        let b = cm_capacity(&c, hi, ChannelModel::Awgn, m).unwrap().raw_nats;
        prop_assert!(a <= b + 1e-9);
        prop_assert!(b <= (c.len() as f64).ln() + 1e-9);
        prop_assert!(b <= hi.ln_1p() + 1e-9);
    }

    #[test]
    fn bicm_never_exceeds_cm(lc in arb_labeled(), snr in 0.0f64..10.0) {
        let m = EvalMethod::quadrature(24).unwrap();
        let cm = cm_capacity(lc.base(), snr, ChannelModel::Awgn, m).unwrap().raw_nats;
        let bicm = bicm_capacity(&lc, snr, ChannelModel::Awgn, m).unwrap().raw_nats;
        prop_assert!(bicm <= cm + 1e-9, "bicm {bicm} cm {cm}");
    }

    #[test]
    fn bit_permutation_leaves_bicm_unchanged(idx in 0usize..6, snr in 0.01f64..10.0, seed in any::<u64>()) {
        let lc = &table_one()[idx];
        let mut perm: Vec<usize> = (0..lc.bits() as usize).collect();
        // Deterministic shuffle from the seed.
        for k in (1..perm.len()).rev() {
            perm.swap(k, (seed >> (8 * k)) as usize % (k + 1));
        }
        let permuted = lc.permute_bits(&perm).unwrap();
        let m = EvalMethod::default();
        let a = bicm_capacity(lc, snr, ChannelModel::Awgn, m).unwrap().raw_nats;
        let b = bicm_capacity(&permuted, snr, ChannelModel::Awgn, m).unwrap().raw_nats;
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn qpsk_gray_bicm_equals_cm_across_snr() {
    let lc = make_psk(4, Labeling::Gray).unwrap();
    for k in 0..30 {
        let snr = 10f64.powf(-3.0 + k as f64 * 0.15);
        let m = EvalMethod::default();
        let cm = cm_capacity(lc.base(), snr, ChannelModel::Awgn, m)
            .unwrap()
            .raw_nats;
        let bicm = bicm_capacity(&lc, snr, ChannelModel::Awgn, m)
            .unwrap()
            .raw_nats;
        assert!((cm - bicm).abs() < 1e-9, "snr {snr}: {cm} vs {bicm}");
    }
}

#[test]
fn large_nakagami_parameter_approaches_awgn() {
    let m = EvalMethod::default();
    for lc in table_one() {
        for snr in [0.01, 0.1, 1.0] {
            let awgn = cm_capacity(lc.base(), snr, ChannelModel::Awgn, m)
                .unwrap()
                .nats;
            let faded = cm_capacity(lc.base(), snr, ChannelModel::Nakagami(1e4), m)
                .unwrap()
                .nats;
            assert!((awgn - faded).abs() <= 1e-4, "snr {snr}: {awgn} vs {faded}");
        }
    }
}

#[test]
fn fading_costs_capacity() {
    let lc = make_qam(16, Labeling::Gray).unwrap();
    let m = EvalMethod::default();
    let awgn = bicm_capacity(&lc, 1.0, ChannelModel::Awgn, m).unwrap().nats;
    let rayleigh = bicm_capacity(&lc, 1.0, ChannelModel::Nakagami(1.0), m)
        .unwrap()
        .nats;
    let severe = bicm_capacity(&lc, 1.0, ChannelModel::Nakagami(0.3), m)
        .unwrap()
        .nats;
    assert!(severe < rayleigh && rayleigh < awgn);
    assert!(awgn < 4.0 * LN_2);
}
