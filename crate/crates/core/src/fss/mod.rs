//! Finite-size-scaling collapse of magnetization curves.
//!
//! Near the transition `M L^{β/ν} = F(ε L^{1/ν})` with
//! `ε = (p̃ - p̃_c) / p̃_c`. The three parameters are found by minimizing a
//! leave-one-size-out collapse quality: every rescaled point is compared
//! with a local linear master curve built only from the neighbouring points
//! of the *other* sizes.

mod collapse;
mod simplex;

pub use collapse::{
    collapse_quality, fit_collapse, rescale, unscale, Bounds, CollapseResult, FitOptions,
    FssDataset, FssRow, Scaled, ScalingParams, Species,
};
pub use simplex::{nelder_mead, SimplexResult};
