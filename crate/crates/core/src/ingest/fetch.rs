//! Translations from the text-to-RDF service, live or from recorded fixtures.
//!
//! A fixture directory holds pairs `<stem>.txt` (the sentence) and
//! `<stem>.nt` (the response). The `.nt` file may start with a
//! `# recorded-at: <RFC 3339 time>` comment. Lookup is exact on the sentence
//! after trimming and collapsing whitespace.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime};

use super::ntriples::{parse_ntriples, Graph, NtError};

/// Environment variable naming the live endpoint.
pub const ENDPOINT_ENV: &str = "MYTHOS_FRED_ENDPOINT";
pub const MAX_ATTEMPTS: u32 = 2;
const RECORDED_AT: &str = "# recorded-at:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationFixture {
    pub input_text: String,
    pub graph: Graph,
    pub recorded_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Live { endpoint: String },
    Fixtures { dir: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("no fixture for {text:?}; available: {}", available.join(" | "))]
    FixtureMissing { text: String, available: Vec<String> },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}:{source}")]
    Parse { origin: String, source: NtError },
    #[error("{endpoint}: {message} (after {attempts} attempts)")]
    Http { endpoint: String, attempts: u32, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FetchError + '_ {
    move |source| FetchError::Io { path: path.to_owned(), source }
}

/// Trims and collapses runs of whitespace to one space.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn read_fixture(txt: &Path) -> Result<TranslationFixture, FetchError> {
    let nt = txt.with_extension("nt");
    let input_text = normalize_text(&fs::read_to_string(txt).map_err(io_err(txt))?);
    let body = fs::read_to_string(&nt).map_err(io_err(&nt))?;
    let graph = parse_ntriples(&body).map_err(|source| FetchError::Parse { origin: nt.display().to_string(), source })?;
    let recorded_at = body.lines().find_map(|l| l.strip_prefix(RECORDED_AT)).map(|v| v.trim().to_owned());
    Ok(TranslationFixture { input_text, graph, recorded_at })
}

/// Every fixture in `dir`, ordered by file name.
pub fn load_fixtures(dir: &Path) -> Result<Vec<TranslationFixture>, FetchError> {
    let mut txts: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt") && p.with_extension("nt").is_file())
        .collect();
    txts.sort();
    txts.iter().map(|p| read_fixture(p)).collect()
}

pub fn fetch_translation(text: &str, mode: &Mode) -> Result<Graph, FetchError> {
    match mode {
        Mode::Fixtures { dir } => {
            let key = normalize_text(text);
            let fixtures = load_fixtures(dir)?;
            match fixtures.iter().find(|f| f.input_text == key) {
                Some(f) => Ok(f.graph.clone()),
                None => Err(FetchError::FixtureMissing {
                    text: key,
                    available: fixtures.into_iter().map(|f| f.input_text).collect(),
                }),
            }
        }
        Mode::Live { endpoint } => fetch_live(endpoint, text),
    }
}

/// GET `endpoint?text=...`, retried once on transport errors and 5xx answers.
fn fetch_live(endpoint: &str, text: &str) -> Result<Graph, FetchError> {
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(60))).build().into();
    let mut message = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        let result = agent.get(endpoint).query("text", text).header("Accept", "text/plain").call();
        match result {
            Ok(mut resp) => {
                let body = resp.body_mut().read_to_string().map_err(|e| FetchError::Http {
                    endpoint: endpoint.to_owned(),
                    attempts: attempt,
                    message: e.to_string(),
                })?;
                return parse_ntriples(&body)
                    .map_err(|source| FetchError::Parse { origin: endpoint.to_owned(), source });
            }
            Err(ureq::Error::StatusCode(code)) if code < 500 => {
                return Err(FetchError::Http {
                    endpoint: endpoint.to_owned(),
                    attempts: attempt,
                    message: format!("http status {code}"),
                });
            }
            Err(e) => message = e.to_string(),
        }
    }
    Err(FetchError::Http { endpoint: endpoint.to_owned(), attempts: MAX_ATTEMPTS, message })
}

fn slug(text: &str) -> String {
    let words: Vec<String> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    let mut s = words.join("-");
    if let Some((cut, _)) = s.char_indices().nth(60) {
        s.truncate(cut);
    }
    if s.is_empty() {
        s.push_str("fixture");
    }
    s
}

/// Writes a fixture pair for `text`, replacing any fixture for the same
/// sentence. Returns the path of the `.nt` file.
pub fn record_fixture(dir: &Path, text: &str, graph: &Graph) -> Result<PathBuf, FetchError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let key = normalize_text(text);
    let base = slug(&key);
    let mut n = 1;
    let txt = loop {
        let stem = if n == 1 { base.clone() } else { format!("{base}-{n}") };
        let txt = dir.join(format!("{stem}.txt"));
        let taken = txt.exists() && normalize_text(&fs::read_to_string(&txt).map_err(io_err(&txt))?) != key;
        if !taken {
            break txt;
        }
        n += 1;
    };
    let nt = txt.with_extension("nt");
    let stamp = humantime::format_rfc3339_seconds(SystemTime::now());
    fs::write(&txt, format!("{key}\n")).map_err(io_err(&txt))?;
    fs::write(&nt, format!("{RECORDED_AT} {stamp}\n{}", graph.to_ntriples())).map_err(io_err(&nt))?;
    Ok(nt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_slugs() {
        assert_eq!(normalize_text("  Hand   dryers\tkill\ncoronavirus "), "Hand dryers kill coronavirus");
        assert_eq!(slug("You should take vitamin C"), "you-should-take-vitamin-c");
        assert_eq!(slug("?!"), "fixture");
    }

    #[test]
    fn record_then_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let g = parse_ntriples("<http://a/s> <http://a/p> <http://a/o> .\n").unwrap();
        let path = record_fixture(dir.path(), "Some  sentence", &g).unwrap();
        assert!(path.ends_with("some-sentence.nt"));
        let mode = Mode::Fixtures { dir: dir.path().to_owned() };
        assert_eq!(fetch_translation(" Some sentence ", &mode).unwrap(), g);
        let fx = load_fixtures(dir.path()).unwrap();
        assert!(fx[0].recorded_at.is_some());
        match fetch_translation("Other sentence", &mode) {
            Err(FetchError::FixtureMissing { available, .. }) => assert_eq!(available, vec!["Some sentence"]),
            other => panic!("{other:?}"),
        }
    }
}
