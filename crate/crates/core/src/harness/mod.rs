//! Experiment drivers: scans, fits, named probe states, the fixed-energy optimizer and the
//! state/support file formats.

pub mod fit;
pub mod named;
pub mod optimize;
pub mod pool;
pub mod scan;
pub mod state_io;

pub use fit::{fit_coherent_scaling, fit_power_law, fit_scaling, ScalingFit};
pub use named::{eval_named_states, named_cutoff, NamedReport, NamedState};
pub use optimize::{optimize_state, IterationRecord, OptimizationResult, OptimizeOptions, CONSTRAINT_TOLERANCE};
pub use pool::{worker_pool, THREADS_ENV};
pub use scan::{
    check_rows, coherent_cutoff, format_float, oracle_tolerance, scan_coherent, scan_diagonal, scan_fock, scan_two_mode, write_csv, CoherentRow,
    ScanOptions, ScanRow, CSV_HEADER, ORACLE_RELATIVE_FLOOR,
};
pub use state_io::{build_state, load_state, load_support, parse_state, state_to_json, StateTerm, LOAD_NORM_TOLERANCE};
