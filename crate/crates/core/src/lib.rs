//! Veech groups of origamis (square-tiled surfaces).
//!
//! An origami is a pair of permutations describing how unit squares are
//! glued. Its Veech group is a finite-index subgroup of SL₂(ℤ), computed
//! here as the stabiliser of the origami under the action of SL₂(ℤ) on
//! equivalence classes. The crate also decides whether that group is a
//! congruence subgroup and builds two infinite families of origamis whose
//! Veech groups are not.

pub mod catalog;
pub mod congruence;
pub mod cosets;
pub mod error;
pub mod freegroup;
pub mod origami;
pub mod sequences;
pub mod sl2;
pub mod veech;

pub use congruence::{is_congruence, CongruenceReport, Verdict, Witness};
pub use error::{Error, Result};
pub use freegroup::{origami_to_subgroup, F2Word, Subgroup};
pub use origami::{Origami, Perm};
pub use sequences::{Base, SequenceSpec};
pub use sl2::{decompose_st, eval_word, MatModN, MatZ2, STWord};
pub use veech::{compute_veech, CurveInvariants, CuspData, VeechGroup};
