//! Command-line and HTTP front ends for the tabqa engine.

pub mod api;
pub mod catalog;
pub mod payload;

pub use api::{router, AppState};
