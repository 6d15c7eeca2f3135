//! Model checking, minimal-dilemma exploration and proof checking for a
//! modal logic of coalition dilemmas under sacrifice bounds.
//!
//! A formula `[C : X @ s]` holds at a state when every strategy of coalition
//! `C` forces some specific member of `X` across all cost-admissible
//! completions, and no nonempty proper subset of `X` has that property.

pub mod formula;
pub mod rational;
pub mod game;
pub mod checker;
pub mod proof;
pub mod fuzz;
