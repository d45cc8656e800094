// SPDX-License-Identifier: Apache-2.0

//! Copyless cost register automata over the tropical semirings, their
//! normal form as weighted automata, and constructions that make them
//! simulate counter machines with zero-tests.

pub mod automata;
pub mod cli;
pub mod cra;
pub mod error;
pub mod normal_form;
pub mod reductions;
pub mod semiring;
pub mod simulation;
pub mod vass;

pub use error::{Error, Exhausted, Result};
