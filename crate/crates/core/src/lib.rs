//! Differentially private tabular synthesis plus a utility-evaluation
//! harness for scoring the output against the source data.

pub mod assoc;
pub mod budget;
pub mod cart;
pub mod consistency;
pub mod data;
pub mod datagen;
pub mod error;
pub mod glm;
pub mod harness;
pub mod ipf;
pub mod marginal;
pub mod mechanisms;
pub mod metrics;
pub mod rng;
pub mod schema;
pub mod stats;
pub mod synth;

pub use assoc::{association_matrix, group_variables, AssociationMatrix, GroupingPlan};
pub use budget::{split_budget, BudgetAccountant, PrivacyParams, SensitivityBound};
pub use cart::{cv_select_cp, fit_cart, CartPrediction, CartTree, CART_CP_GRID, CART_MIN_LEAF};
pub use consistency::enforce_consistency;
pub use data::{discretize, BinnedView, Column, Dataset, LoadPolicy, LoadReport};
pub use error::{Error, Result};
pub use glm::{
    build_design, fit_glm, glm_confidence_intervals, ConfidenceInterval, DesignColumn,
    DesignMatrix, Family, FittedGLM,
};
pub use harness::{
    cmd_evaluate, cmd_pipeline, cmd_report, cmd_synth, load_context, write_evaluation,
    EvalOutput, RunConfig, RunContext, RunOutcome, UtilityReport,
};
pub use ipf::fit_joint;
pub use marginal::{build_marginal, sample_group, MarginalTable};
pub use metrics::nist::{gini, nist_classification, nist_clustering, nist_regression};
pub use metrics::propensity::{
    null_pmse_bootstrap, null_pmse_parametric, pmse, pmse_ratio, propensity_run, specks,
    Classifier, PropensityRun,
};
pub use metrics::regression::{
    ci_overlap, correlation_metrics, std_coef_diff, CiOverlap, CoefficientAgreement,
    ModelComparison, RegressionSpec,
};
pub use metrics::univariate::{
    marginal_chisq_pvalue, marginal_ks_pvalue, marginal_means, MarginalMeans,
};
pub use metrics::{MetricCategory, MetricResult, Orientation};
pub use rng::SeededRng;
pub use schema::{ColumnKind, ColumnSpec, Schema};
pub use synth::{
    synth_dpsyn, synth_fieldgroups, Algorithm, RowTarget, SynthesisConfig, SyntheticBundle,
    ThresholdMode,
};
