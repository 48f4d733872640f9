use bicm_core::{wideband_figures, Slope};

use crate::format::{fixed, Csv};
use crate::reference::TABLE_ONE;
use crate::scheme::{group_selectors, Scheme};
use crate::{Failure, SharedArgs};

pub const COLUMNS: [&str; 6] = [
    "scheme",
    "c1",
    "ebno_lim_linear",
    "ebno_lim_db",
    "c2",
    "zeta0",
];

pub fn run(shared: &SharedArgs, tokens: &[String]) -> Result<String, Failure> {
    let selectors = if tokens.is_empty() {
        TABLE_ONE.iter().map(|r| r.selector.to_string()).collect()
    } else {
        group_selectors(tokens)?
    };
    let schemes = selectors
        .iter()
        .map(|s| Scheme::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::with_header(&COLUMNS);
    for scheme in &schemes {
        let k = scheme.coeffs(shared.channel)?;
        let fig = wideband_figures(k)?;
        let slope = match fig.slope_zeta0 {
            Slope::Finite(z) => fixed(z),
            Slope::Unbounded => "unbounded".into(),
        };
        csv.row([
            scheme.name.clone(),
            fixed(k.c1),
            fixed(fig.ebno_lim_linear),
            fixed(fig.ebno_lim_db),
            fixed(k.c2),
            slope,
        ]);
    }
    Ok(csv.into_string())
}
