//! Frozen output schema identifiers. Field names and CSV columns are
//! documented in `docs/schema.md`; bump [`SCHEMA_VERSION`] on any change.

pub const SCHEMA_VERSION: &str = "tgalab/1";

pub const TRACE_COLUMNS: [&str; 3] = ["m", "indices", "residual"];
pub const SIGMA_COLUMNS: [&str; 3] = ["k", "sigma", "sigma_tilde"];
pub const NORM_COLUMNS: [&str; 1] = ["norm"];
pub const CONSTANT_COLUMNS: [&str; 6] = ["name", "value", "observed", "seed", "trials", "skipped"];
pub const WEIGHT_COLUMNS: [&str; 2] = ["n", "w_n"];
pub const REPORT_COLUMNS: [&str; 4] = ["check_id", "tier", "status", "measured"];

/// Leading comment line of every CSV emitted by the crate.
pub fn csv_preamble() -> String {
    format!("# schema: {SCHEMA_VERSION}\n")
}
