//! Induced dynamics of non-autonomous interval and circle systems.

pub mod chains;
pub mod entropy;
pub mod error;
pub mod fuzzy;
pub mod hyperspace;
pub mod maps;
pub mod rational;
pub mod sensitivity;
pub mod shadowing;

pub use error::{Error, Result};
pub use rational::{q, Rational};
