//! Exact computational machinery for free-by-abelian groups `F_n ⋊ Z^d`.
//!
//! The crate certifies, for a finite generating set of such a group, either a
//! short free basis (with an entropy lower bound) or an explicit group law the
//! generated subgroup satisfies, and it measures growth by exact ball
//! enumeration.
//!
//! Module map:
//! - [`word`]: freely reduced words in a free group, primitive roots.
//! - [`stallings`]: folded core graphs, subgroup rank/membership/basis.
//! - [`laws`]: group laws, composition, evaluation, ball checking.
//! - [`extension`]: verified automorphisms and normal forms in `F_n ⋊ Z^d`.
//! - [`certify`]: the free-basis / law-certificate dichotomy.
//! - [`growth`]: exact ball censuses and entropy bounds.
//! - [`cli`]: batch front end (spec files, JSON reports).

pub mod word;
pub mod stallings;
pub mod laws;
pub mod extension;
pub mod certify;
pub mod growth;
pub mod cli;
