//! Exponential random graph models on undirected networks: change statistics,
//! a dyad Gibbs sampler, MPLE / MC-MLE / exact fitting, stochastic forward
//! selection of endogenous terms and motif-based degeneracy screening.

pub mod error;
pub mod estimation;
pub mod float;
pub mod graph;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod sampler;
pub mod screening;
pub mod seed;
pub mod selection;
pub mod stats;
pub mod terms;

pub use error::{ErgmError, Result};
pub use estimation::{
    fit_exact, fit_mcmle, fit_mple, fit_null, relative_aic_change, Divergence, ExactFitter, FitMethod, FitResult,
    Fitter, McmleConfig, McmleFitter, MpleFitter, DIVERGENCE_THRESHOLD, FAILED_FIT_B,
};
pub use graph::{Attribute, Direction, DyadToggle, Network};
pub use model::ErgmModel;
pub use pipeline::{run_pipeline, PipelineOptions, PipelineOutcome};
pub use sampler::{sample, sample_nodes, sample_stats, Init, Sample, SamplerConfig};
pub use screening::{parse_rules, screen, select_best, ScreeningReport, ScreeningRule};
pub use seed::derive_seed;
pub use selection::{
    bound_all, bound_input, build_candidate_set, model_space_size, stochastic_forward_select, Bounds, CandidateSet,
    Category, SelectionReport, TermVerdict,
};
pub use stats::{change_stat, global_stat, homomorphism_count, homomorphism_density, motif_census, stat_vector, Motif, MotifCensus};
pub use terms::{parse_model_terms, Family, TermSpec};
