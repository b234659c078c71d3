//! The bundled corpora are checked in as JSON so downstream tests can read
//! them without the generator. Run with `NKG_BLESS=1` to rewrite them.

use std::path::PathBuf;

use nkg_core::fixtures::{lexical_fixture, paper_fixture};
use nkg_core::{parse_corpus, validate_corpus, AnnotationCorpus};

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn check(name: &str, corpus: AnnotationCorpus) {
    let path = fixture_path(name);
    let expected = corpus.to_json();
    if std::env::var_os("NKG_BLESS").is_some() {
        std::fs::write(&path, &expected).unwrap();
    }
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        on_disk,
        expected,
        "{} is stale; rerun with NKG_BLESS=1",
        path.display()
    );
    let parsed = parse_corpus(&on_disk).unwrap();
    assert_eq!(parsed, corpus);
    assert!(validate_corpus(&parsed).is_empty());
}

#[test]
fn family_story_file_matches() {
    let c = paper_fixture();
    assert_eq!(c.panels.len(), 9);
    let orders: Vec<u32> = c.panels.iter().map(|p| p.reading_order).collect();
    assert_eq!(orders, (0..9).collect::<Vec<_>>());
    check("family_story.json", c);
}

#[test]
fn chores_story_file_matches() {
    check("chores_story.json", lexical_fixture());
}
