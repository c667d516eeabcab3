use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{key} = {value} is out of range: expected {expected}")]
    Range {
        key: &'static str,
        value: String,
        expected: String,
    },

    #[error(
        "k = {0} is degenerate: with a single potential parent real plants have no advantage \
         over ghosts and a finite population empties in finite time almost surely; use k >= 2"
    )]
    DegenerateK(u64),

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("occupancy at generation {0} requires the previous occupancy state")]
    MissingPrevious(u64),

    #[error(
        "coupling violated at generation {generation}, patch {patch}: \
         occupancy (O={o_k}, h={h_k}) vs BOA (O={o_boa}, h={h_boa})"
    )]
    CouplingViolation {
        generation: u64,
        patch: i64,
        o_k: bool,
        h_k: u32,
        o_boa: bool,
        h_boa: u32,
    },

    #[error("initial occupancy specification invalid: {0}")]
    SpecViolation(String),

    #[error("p_crit scan reached p = 0 without meeting the acceptance threshold")]
    ScanExhausted,

    #[error("enumeration budget exceeded: width {width} x horizon {horizon} > {budget} sites")]
    BudgetExceeded {
        width: usize,
        horizon: usize,
        budget: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range_err(key: &'static str, value: impl ToString, expected: impl ToString) -> Error {
    Error::Range {
        key,
        value: value.to_string(),
        expected: expected.to_string(),
    }
}
