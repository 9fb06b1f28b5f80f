//! Large-scale hypothesis testing when null effects are not exactly zero.
//!
//! Each hypothesis `i` is summarized by an effect estimate `xbar_i`, a
//! variance estimate `s2_i` and its degrees of freedom. Null effects are
//! drawn from `N(0, tau2)` with an unknown spreading variance `tau2`; the
//! crate estimates `tau2` (iterated empirical Bayes, truncated maximum
//! likelihood, central matching), turns it into Welch-type p-values, and
//! selects strong signals with FDR-controlling rejection rules.
//!
//! Modules:
//!
//! - [`distributions`]: incomplete beta, t and F tails, the null tail and its
//!   quantile, and a Monte-Carlo oracle.
//! - [`summaries`]: replicate matrices and their reduction to per-gene
//!   summaries, plus quantile normalization and paired log differences.
//! - [`estimators`]: the three `tau2` estimators.
//! - [`testing`]: p-values, BH, Bonferroni, the dual-threshold rule and the
//!   oracle rule.
//! - [`simulation`]: synthetic scenarios and experiment drivers.
//! - [`cli`]: the commands behind the `iteb` binary.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod io;
pub mod optimize;
pub mod simulation;
pub mod summaries;
pub mod testing;

pub use distributions::{
    f_sf, normal_sf, null_quantile, null_sf, null_sf_mc_oracle, reg_inc_beta, student_t_sf,
    McEstimate, NullTailParams,
};
pub use error::{Error, Result};
pub use estimators::{
    central_matching, eb_pilot, iteb, truncated_mle, CmConfig, Diagnostics, ItebConfig, Method,
    TauEstimate, TmleConfig,
};
pub use summaries::{GeneSummary, Group, ReplicateMatrix};
pub use testing::{bh, bonferroni, dual_threshold, oracle_reject, pvalues, Procedure, TestOutcome};
