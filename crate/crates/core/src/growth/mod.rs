//! Index and rank growth along the filtration `G_n` of a uniform group.

mod howson;
mod quotient;

pub use howson::{howson_rank, GroupRingElement, GroupRingModule, HowsonRank};
pub use quotient::{
    fit_power, gv_bound, index_growth, tail_window, Element, FiniteQuotientGroup, GroupKind, GvBound, IndexGrowth, PowerFit,
    MAX_COSETS,
};
