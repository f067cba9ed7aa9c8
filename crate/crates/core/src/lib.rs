//! Evidence-use scoring, revision extraction and rubric feedback selection
//! for argumentative essay drafts.

pub mod classify;
pub mod cli;
pub mod embedding;
pub mod engine;
pub mod eval;
pub mod feedback;
pub mod lexicon;
pub mod platform;
pub mod revision;
pub mod scoring;
pub mod text;
