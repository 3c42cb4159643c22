//! Regional policy evaluation toolkit.
//!
//! * [`dea`] scores units with input-oriented CCR and super-efficiency DEA,
//!   one cross section per year, on top of the simplex in [`lp`].
//! * [`hcw`] builds a treated unit's no-intervention path from an
//!   exhaustively selected group of untreated units and reports the
//!   treatment effects.
//! * [`robustness`] repeats the evaluation with an earlier, fake
//!   intervention date.

pub mod dea;
pub mod error;
pub mod hcw;
pub mod lp;
pub mod ols;
pub mod panel;
pub mod robustness;
pub mod special;
pub mod synthetic;

pub use dea::{
    ccr_efficiency, efficiency_table, super_efficiency, yearly_range, EfficiencyResult,
    EfficiencyTable, RtsClass,
};
pub use error::{Error, Result};
pub use hcw::{
    best_subset_of_size, evaluate, predict_counterfactual, select_control_group, treatment_effects,
    ControlSelection, Evaluation, TreatmentEffectSeries,
};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use ols::{aic_score, aicc_score, ols_fit, AicVariant, OlsFit};
pub use panel::{
    bundled_table1, load_dea_dataset, load_outcome_panel, write_panel, DeaDataset,
    EvaluationConfig, OutcomePanel,
};
pub use robustness::{compare_paths, placebo_in_time, PathComparison, PlaceboReport};
