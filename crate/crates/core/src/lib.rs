//! Conflict detection between untrusted claims and trusted knowledge with a
//! description logic reasoner.
//!
//! A claim and the facts it is checked against are formalized as knowledge
//! bases ([`model`], read and written as KRSS by [`krss`]), merged, enriched
//! by Horn rules ([`rules`]) and checked by a tableau reasoner ([`tableau`])
//! and a syntactic linter ([`antipatterns`]). Defects are explained by minimal
//! justifications verbalized in English ([`justify`]). [`ingest`] turns
//! machine-reading RDF output into knowledge bases and [`pipeline`] ties the
//! steps together.

pub mod antipatterns;
pub mod cli;
pub mod ingest;
pub mod justify;
pub mod krss;
pub mod model;
pub mod pipeline;
pub mod rules;
pub mod tableau;
