use std::f64::consts::LOG2_E;

use bicm_core::expansion::{capacity_series, linear_ebno_approx};
use bicm_core::units::{db_to_linear, linear_to_db};
use bicm_core::{wideband_figures, CapacityEvaluator, Execution};

use crate::format::{db_grid, field, Csv};
use crate::scheme::{group_selectors, Scheme};
use crate::{Axis, Failure, SharedArgs};

/// The range always walks SNR in dB; on the Eb/N0 axis the first column is
/// `snr / C` with `C` in bits (BICM for labeled schemes, CM otherwise), so
/// rows stay in increasing SNR order even where Eb/N0 is not monotone.
pub fn run(
    shared: &SharedArgs,
    tokens: &[String],
    axis: Axis,
    start: f64,
    stop: f64,
    step: f64,
) -> Result<String, Failure> {
    let selectors = group_selectors(tokens)?;
    let [selector] = selectors.as_slice() else {
        return Err(Failure::Usage(format!(
            "sweep takes one scheme, got {}",
            selectors.len()
        )));
    };
    let scheme = Scheme::parse(selector)?;
    let grid = db_grid(start, stop, step).map_err(Failure::Usage)?;
    let eval = CapacityEvaluator::new(shared.channel, shared.eval_method())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    // Non-normalized inputs have no expansion; their series columns stay empty.
    let coeffs = scheme.coeffs(shared.channel).ok();
    let has_slope = coeffs
        .and_then(|k| wideband_figures(k).ok())
        .is_some_and(|f| f.slope_zeta0.finite().is_some());

    let rows = Execution::default().map(&grid, |&db| -> Result<Vec<String>, Failure> {
        let snr = db_to_linear(db);
        let cm = eval.cm(scheme.constellation(), snr)?.bits();
        let bicm = scheme
            .labeled()
            .map(|lc| eval.bicm(lc, snr))
            .transpose()?
            .map(|c| c.bits());
        let reference = bicm.unwrap_or(cm);
        let ebno = (reference > 0.0).then(|| snr / reference);
        let x = match axis {
            Axis::Snr => Some(db),
            Axis::Ebno => ebno.map(linear_to_db),
        };
        let series = coeffs.map(|k| capacity_series(k, snr) * LOG2_E);
        let linear = match (coeffs, ebno) {
            (Some(k), Some(e)) if has_slope => linear_ebno_approx(k, e).ok().map(|c| c.max(0.0)),
            _ => None,
        };
        Ok(vec![
            field(x),
            field(Some(cm)),
            field(bicm),
            field(Some(snr.ln_1p() * LOG2_E)),
            field(series),
            field(linear),
        ])
    });

    let x_name = match axis {
        Axis::Snr => "snr_db",
        Axis::Ebno => "ebno_db",
    };
    let mut csv = Csv::with_header(&[
        x_name,
        "cm_bits",
        "bicm_bits",
        "gaussian_bits",
        "series_bits",
        "linear_approx_bits",
    ]);
    for row in rows {
        csv.row(row?);
    }
    Ok(csv.into_string())
}
