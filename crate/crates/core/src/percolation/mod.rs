//! Oriented site percolation with dormancy: a site is reached if an open path with
//! spatial steps in {−1, 0, +1} and time gaps of 1..=H+1 leads to it from the
//! half-line base. The growth rate of the rightmost reached site locates the
//! critical extinction probability.

mod exact;
mod frontier;

pub use exact::{exact_survival_small, survives, ENUMERATION_BUDGET};
pub use frontier::{
    open_row, open_row_prefix, pcrit_scan, rbar, write_scan_rows, PercConfig, PercFrontier, ScanProbe, ScanResult,
    SCAN_CSV_HEADER, THRESHOLD_CSV_HEADER,
};
