//! Computational Iwasawa theory at desk scale.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`] exact residue-ring arithmetic, truncated power series,
//!   Newton polygons and Smith normal forms;
//! * [`bernoulli`] Bernoulli numbers modulo `p^m` and irregular pairs;
//! * [`lfunction`] Stickelberger branch series and the minus-part
//!   `lambda`/`mu` invariants of `Q(mu_{p^infty})`;
//! * [`kida`] Kida's formula over combinatorial tower data;
//! * [`rank`] `Lambda(G)`-rank formulas and pseudo-nullity verdicts;
//! * [`lab`] finite `G`-modules, Tate cohomology and the lemma verifiers;
//! * [`growth`] index growth in uniform pro-`p` groups and Howson's criterion.

pub mod bernoulli;
pub mod error;
pub mod growth;
pub mod kida;
pub mod lab;
pub mod lfunction;
pub mod padic;
pub mod rank;

pub use error::{Error, Result};
