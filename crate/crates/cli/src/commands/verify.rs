use std::fmt::Write;

use bicm_core::expansion::default_fit_grid;
use bicm_core::{
    bicm_coeffs, cm_coeffs, fit_coeffs_numeric, gaussian_reference, make_psk, make_qam,
    wideband_figures, CapacityEvaluator, ChannelModel, EvalMethod, ExpansionCoeffs,
    LabeledConstellation, Labeling,
};

use crate::reference::{Tolerances, PRINTED, STRICT, TABLE_ONE};
use crate::scheme::Scheme;
use crate::{Failure, MethodSpec, Profile, SharedArgs};

pub const FIT_TOL: f64 = 5e-3;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const IDENTITY_SNRS: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
const DEFAULT_MC_SAMPLES: u64 = 20_000;

#[derive(Default)]
struct Report {
    text: String,
    total: usize,
    failed: usize,
}

impl Report {
    fn check(&mut self, ok: bool, name: &str, detail: String) {
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        let _ = writeln!(
            self.text,
            "{} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }

    fn error(&mut self, name: &str, err: impl std::fmt::Display) {
        self.check(false, name, format!("error: {err}"));
    }
}

fn reference_schemes(replace: &[String]) -> Result<Vec<(String, LabeledConstellation)>, Failure> {
    let mut schemes = Vec::new();
    for row in &TABLE_ONE {
        let built = Scheme::parse(row.selector)?;
        schemes.push((
            row.selector.to_string(),
            built.labeled().cloned().expect("labeled built-in"),
        ));
    }
    for spec in replace {
        let (key, path) = spec.split_once('=').ok_or_else(|| {
            Failure::Usage(format!(
                "--replace expects <scheme>=<file.json>, got '{spec}'"
            ))
        })?;
        let slot = schemes
            .iter_mut()
            .find(|(name, _)| name == key)
            .ok_or_else(|| Failure::Usage(format!("'{key}' is not a reference scheme")))?;
        let scheme = Scheme::from_file(path.as_ref())?;
        slot.1 = scheme
            .labeled()
            .cloned()
            .ok_or_else(|| Failure::Usage(format!("{path}: replacement needs labels")))?;
    }
    Ok(schemes)
}

fn table_checks(report: &mut Report, schemes: &[(String, LabeledConstellation)], tol: Tolerances) {
    for ((name, lc), row) in schemes.iter().zip(&TABLE_ONE) {
        let (k, fig) = match bicm_coeffs(lc).and_then(|k| Ok((k, wideband_figures(k)?))) {
            Ok(v) => v,
            Err(e) => {
                report.error(&format!("table {name}"), e);
                continue;
            }
        };
        let mut cell = |what: &str, got: f64, want: f64, ok: bool, tol: String| {
            report.check(
                ok,
                &format!("table {name} {what}"),
                format!("{got:.6} vs {want} (tol {tol})"),
            );
        };
        cell(
            "c1",
            k.c1,
            row.c1,
            (k.c1 - row.c1).abs() <= tol.coeff,
            tol.coeff.to_string(),
        );
        cell(
            "ebno_lim",
            fig.ebno_lim_linear,
            row.ebno_lim_linear,
            (fig.ebno_lim_linear - row.ebno_lim_linear).abs() <= tol.coeff,
            tol.coeff.to_string(),
        );
        cell(
            "ebno_lim_db",
            fig.ebno_lim_db,
            row.ebno_lim_db,
            (fig.ebno_lim_db - row.ebno_lim_db).abs() <= tol.db,
            format!("{} dB", tol.db),
        );
        cell(
            "c2",
            k.c2,
            row.c2,
            (k.c2 - row.c2).abs() <= tol.coeff,
            tol.coeff.to_string(),
        );
        match fig.slope_zeta0.finite() {
            Some(z) => cell(
                "zeta0",
                z,
                row.zeta0,
                ((z - row.zeta0) / row.zeta0).abs() <= tol.slope_rel,
                format!("{}%", tol.slope_rel * 100.0),
            ),
            None => report.check(
                false,
                &format!("table {name} zeta0"),
                "unbounded slope".into(),
            ),
        }
    }
}

fn fit_check(
    report: &mut Report,
    name: &str,
    capacity: impl Fn(f64) -> bicm_core::Result<f64>,
    closed: ExpansionCoeffs,
) {
    match fit_coeffs_numeric(capacity, &default_fit_grid(), ChannelModel::Awgn) {
        Ok(fit) => {
            let ok = (fit.c1 - closed.c1).abs() <= FIT_TOL && (fit.c2 - closed.c2).abs() <= FIT_TOL;
            report.check(
                ok,
                &format!("fit {name}"),
                format!(
                    "numeric ({:.6}, {:.6}) vs closed form ({:.6}, {:.6}) (tol {FIT_TOL})",
                    fit.c1, fit.c2, closed.c1, closed.c2
                ),
            );
        }
        Err(e) => report.error(&format!("fit {name}"), e),
    }
}

pub fn run(
    shared: &SharedArgs,
    profile: Profile,
    replace: &[String],
) -> Result<(String, Result<(), Failure>), Failure> {
    let schemes = reference_schemes(replace)?;
    let tol = match profile {
        Profile::Strict => STRICT,
        Profile::Printed => PRINTED,
    };
    let quad = match shared.method {
        MethodSpec::Quadrature(order) => EvalMethod::quadrature(order)?,
        MethodSpec::MonteCarlo(_) => EvalMethod::default(),
    };
    let eval = CapacityEvaluator::new(ChannelModel::Awgn, quad)?;
    let mut report = Report::default();

    table_checks(&mut report, &schemes, tol);

    fit_check(
        &mut report,
        "gaussian",
        |s| Ok(gaussian_reference(s)?.nats),
        ExpansionCoeffs::awgn(1.0, -0.5),
    );
    let cm_sets = [
        ("qpsk cm", make_psk(4, Labeling::Gray)?),
        ("8psk cm", make_psk(8, Labeling::Gray)?),
        ("16qam cm", make_qam(16, Labeling::Gray)?),
    ];
    for (name, lc) in &cm_sets {
        fit_check(
            &mut report,
            name,
            |s| Ok(eval.cm(lc.base(), s)?.raw_nats),
            cm_coeffs(lc.base()),
        );
    }
    for (name, lc) in &schemes {
        match bicm_coeffs(lc) {
            Ok(closed) => fit_check(
                &mut report,
                name,
                |s| Ok(eval.bicm(lc, s)?.raw_nats),
                closed,
            ),
            Err(e) => report.error(&format!("fit {name}"), e),
        }
    }

    for (name, lc) in &schemes {
        for snr in IDENTITY_SNRS {
            let check = format!("identity {name} snr={snr}");
            match (eval.bicm(lc, snr), eval.bicm_direct(lc, snr)) {
                (Ok(a), Ok(b)) => {
                    let gap = (a.raw_nats - b.raw_nats).abs();
                    report.check(
                        gap <= IDENTITY_TOL,
                        &check,
                        format!("|difference| = {gap:.3e} (tol {IDENTITY_TOL:e})"),
                    );
                }
                (Err(e), _) | (_, Err(e)) => report.error(&check, e),
            }
        }
    }

    let samples = match shared.method {
        MethodSpec::MonteCarlo(n) => n,
        MethodSpec::Quadrature(_) => DEFAULT_MC_SAMPLES,
    };
    let mc = CapacityEvaluator::new(
        ChannelModel::Awgn,
        EvalMethod::monte_carlo(samples, shared.seed)?,
    )?;
    for (name, lc) in schemes
        .iter()
        .filter(|(n, _)| n == "qpsk:gray" || n == "16qam:gray")
    {
        let check = format!("monte-carlo {name} snr=1");
        match (mc.bicm(lc, 1.0), eval.bicm(lc, 1.0)) {
            (Ok(m), Ok(q)) => {
                let gap = (m.raw_nats - q.raw_nats).abs();
                report.check(
                    gap <= 4.0 * m.std_error,
                    &check,
                    format!(
                        "|mc - quad| = {gap:.3e}, 4 se = {:.3e} (seed {})",
                        4.0 * m.std_error,
                        shared.seed
                    ),
                );
            }
            (Err(e), _) | (_, Err(e)) => report.error(&check, e),
        }
    }

    let _ = writeln!(
        report.text,
        "{} of {} checks passed",
        report.total - report.failed,
        report.total
    );
    let outcome = if report.failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks {
            failed: report.failed,
            total: report.total,
        })
    };
    Ok((report.text, outcome))
}
