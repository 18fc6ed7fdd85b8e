//! Published lifetimes used by `reproduce`, in seconds.

use crate::report::Channel;

/// Bump when any cell changes.
pub const TABLE_VERSION: u32 = 1;

/// Largest accepted `|computed - reference| / reference` per cell.
pub const REPRODUCTION_TOLERANCE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub f0_ghz: f64,
    pub t1: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTable {
    pub id: u8,
    pub channel: Channel,
    pub title: &'static str,
    pub rows: &'static [ReferenceRow],
}

const fn row(f0_ghz: f64, t1: f64, t2: f64) -> ReferenceRow {
    ReferenceRow { f0_ghz, t1, t2 }
}

/// Surface-displacement channel.
pub const DISPLACEMENT: ReferenceTable = ReferenceTable {
    id: 1,
    channel: Channel::Displacement,
    title: "phonon-induced surface displacement",
    rows: &[
        row(1.0, 183.1, 366.2),
        row(2.0, 4.79, 9.58),
        row(3.0, 0.63, 1.26),
        row(4.0, 0.16, 0.32),
        row(5.0, 0.06, 0.12),
        row(6.0, 0.026, 5.31e-2),
        row(7.0, 0.014, 2.81e-2),
        row(8.0, 8.3e-3, 1.66e-2),
        row(9.0, 5.3e-3, 1.06e-2),
        row(10.0, 3.6e-3, 7.29e-3),
    ],
};

/// Dielectric-constant modulation channel.
pub const MODULATION: ReferenceTable = ReferenceTable {
    id: 2,
    channel: Channel::Modulation,
    title: "phonon-induced dielectric-constant modulation",
    rows: &[
        row(1.0, 13.49, 27.0),
        row(2.0, 0.33, 0.66),
        row(3.0, 0.041, 0.082),
        row(4.0, 0.010, 1.98e-2),
        row(5.0, 3.4e-3, 6.81e-3),
        row(6.0, 1.5e-3, 2.94e-3),
        row(7.0, 7.4e-4, 1.48e-3),
        row(8.0, 4.2e-4, 8.34e-4),
        row(9.0, 2.6e-4, 5.11e-4),
        row(10.0, 1.7e-4, 3.33e-4),
    ],
};

pub fn table(id: u8) -> Option<&'static ReferenceTable> {
    match id {
        1 => Some(&DISPLACEMENT),
        2 => Some(&MODULATION),
        _ => None,
    }
}

pub fn relative_error(computed: f64, reference: f64) -> f64 {
    (computed - reference) / reference
}
