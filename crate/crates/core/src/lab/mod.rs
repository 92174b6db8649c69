//! A laboratory for finite modules under a cyclic group `G` of order `p`.

pub mod blocks;
mod group;
mod lambda;
mod lattice;
mod module;
mod sequence;
mod verify;

pub use group::{AbelianPGroup, Hom, Subgroup};
pub use lambda::{derived_fits, fit_growth, Component, DerivedFits, DerivedMu, ElementaryLambdaModule, GAction, GrowthFit, LambdaFactor, MIN_FIT_LEVELS};
pub use lattice::{lattice_decomposition, LatticeDecomposition};
pub use module::{filtration_data, tate_cohomology, FiltrationData, GModule, TateCohomology};
pub use sequence::{
    alternating_log_order, check_exactness, exact_chain, psi_herbrand, psi_minus_orders, split_sequence, ExactnessReport, PsiVerdict,
};
pub use verify::{
    default_family, default_levels, random_gmodule, remark_herbrand, verify_basiclemma, verify_finite_herbrand,
    verify_fptrivial, verify_mptrivial, verify_psi, verify_remark, Failure, LabReport, RemarkReport, Witness,
};
