//! Published low-SNR figures for the six reference BICM schemes.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    /// Built-in selector.
    pub selector: &'static str,
    pub c1: f64,
    pub ebno_lim_linear: f64,
    pub ebno_lim_db: f64,
    pub c2: f64,
    pub zeta0: f64,
}

pub const TABLE_ONE: [TableRow; 6] = [
    TableRow {
        selector: "qpsk:gray",
        c1: 1.000,
        ebno_lim_linear: 0.693,
        ebno_lim_db: -1.592,
        c2: -0.500,
        zeta0: 4.163,
    },
    TableRow {
        selector: "qpsk:anti-gray",
        c1: 0.500,
        ebno_lim_linear: 1.386,
        ebno_lim_db: 1.419,
        c2: 0.250,
        zeta0: -1.041,
    },
    TableRow {
        selector: "8psk:gray",
        c1: 0.854,
        ebno_lim_linear: 0.812,
        ebno_lim_db: -0.904,
        c2: -0.239,
        zeta0: 5.410,
    },
    TableRow {
        selector: "8psk:sp",
        c1: 0.427,
        ebno_lim_linear: 1.624,
        ebno_lim_db: 2.106,
        c2: 0.005,
        zeta0: -29.966,
    },
    TableRow {
        selector: "16qam:gray",
        c1: 0.800,
        ebno_lim_linear: 0.866,
        ebno_lim_db: -0.627,
        c2: -0.160,
        zeta0: 6.660,
    },
    TableRow {
        selector: "16qam:sp",
        c1: 0.500,
        ebno_lim_linear: 1.386,
        ebno_lim_db: 1.419,
        c2: -0.310,
        zeta0: 0.839,
    },
];

/// Cell tolerances for the table comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute, for c1, c2 and the linear limit.
    pub coeff: f64,
    /// Absolute, in dB.
    pub db: f64,
    /// Relative, for the slope.
    pub slope_rel: f64,
}

/// The acceptance tolerances.
pub const STRICT: Tolerances = Tolerances {
    coeff: 5e-4,
    db: 1e-3,
    slope_rel: 1e-3,
};

/// Half a unit in the last printed digit of every cell, with the slope
/// allowed the spread produced by a rounded `c2`.
pub const PRINTED: Tolerances = Tolerances {
    coeff: 5e-4,
    db: 5e-3,
    slope_rel: 1e-2,
};
