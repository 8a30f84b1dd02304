//! From machine-reading output to knowledge bases: an N-Triples reader, the
//! normalization of reader-specific conventions, and access to the
//! translation service or its recorded answers.

pub mod fetch;
pub mod fred;
pub mod ntriples;

pub use fetch::{fetch_translation, load_fixtures, record_fixture, FetchError, Mode, TranslationFixture};
pub use fred::{normalize_fred, Disposition, Normalized, Warning};
pub use ntriples::{parse_ntriples, Graph, NtError, Object, Triple};
