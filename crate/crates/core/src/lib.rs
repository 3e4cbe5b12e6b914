//! Document preservation, evidence packs, canonical medication ontology and
//! contextual refraction.

pub mod canonical;
pub mod clock;
pub mod journal;
pub mod lector;
pub mod ontology;
pub mod patos;
pub mod refraction;
pub mod corpus;
pub mod error;
pub mod fixture;
pub mod metrics;

pub use corpus::Corpus;
pub use error::{Error, Result};
