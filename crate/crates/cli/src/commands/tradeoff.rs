use bicm_core::tradeoff::exact_tradeoff_curve;
use bicm_core::units::db_to_linear;
use bicm_core::{delta_w_approx, CapacityEvaluator, Error, Execution, TradeoffQuery};

use crate::format::{db_grid, field, Csv};
use crate::scheme::{group_selectors, Scheme};
use crate::{Failure, SharedArgs, TradeoffMode};

/// Above this baseline SNR the low-SNR approximation is unreliable.
pub const LOW_SNR_WARNING_DB: f64 = -10.0;

fn missing_is_fine(r: Result<f64, Error>) -> Result<Option<f64>, Failure> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Diverged { .. } | Error::NoSolution(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(
    shared: &SharedArgs,
    tokens: &[String],
    snr1_db: f64,
    (start, stop, step): (f64, f64, f64),
    mode: TradeoffMode,
) -> Result<String, Failure> {
    let selectors = group_selectors(tokens)?;
    let [first, second] = selectors.as_slice() else {
        return Err(Failure::Usage(format!(
            "tradeoff takes a baseline and an alternative scheme, got {}",
            selectors.len()
        )));
    };
    let (base, alt) = (Scheme::parse(first)?, Scheme::parse(second)?);
    if !snr1_db.is_finite() {
        return Err(Failure::Usage("--snr1-db must be finite".into()));
    }
    if snr1_db > LOW_SNR_WARNING_DB {
        eprintln!("warning: baseline SNR {snr1_db} dB is above {LOW_SNR_WARNING_DB} dB; the low-SNR approximation may be poor");
    }
    let grid = db_grid(start, stop, step).map_err(Failure::Usage)?;
    let delta_ps: Vec<f64> = grid.iter().map(|&db| db_to_linear(db)).collect();
    let snr1 = db_to_linear(snr1_db);

    let approx: Vec<Option<f64>> = if mode == TradeoffMode::Exact {
        vec![None; grid.len()]
    } else {
        let q = TradeoffQuery::new(
            base.coeffs(shared.channel)?,
            alt.coeffs(shared.channel)?,
            snr1,
        )?;
        delta_ps
            .iter()
            .map(|&dp| missing_is_fine(delta_w_approx(&q, dp)))
            .collect::<Result<_, _>>()?
    };
    let exact: Vec<Option<f64>> = if mode == TradeoffMode::Approx {
        vec![None; grid.len()]
    } else {
        let eval = CapacityEvaluator::new(shared.channel, shared.eval_method())
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let cap1 = |s: f64| base.capacity(&eval, s).map(|c| c.raw_nats);
        let cap2 = |s: f64| alt.capacity(&eval, s).map(|c| c.raw_nats);
        exact_tradeoff_curve(Execution::default(), cap1, cap2, snr1, &delta_ps)
            .into_iter()
            .map(missing_is_fine)
            .collect::<Result<_, _>>()?
    };

    let mut csv = Csv::with_header(&["delta_p_db", "delta_w_approx", "delta_w_exact"]);
    for ((db, a), e) in grid.iter().zip(approx).zip(exact) {
        csv.row([field(Some(*db)), field(a), field(e)]);
    }
    Ok(csv.into_string())
}
