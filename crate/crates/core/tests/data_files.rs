//! The JSON files under `data/` match the in-library fixtures.
//! Set `SYMSPEC_WRITE_DATA=1` to regenerate them.

use std::path::PathBuf;

use symspec::io::DenseJson;
use symspec::witness::fixtures::{fixture_json, FIXTURE_NAMES};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn data_files_match_fixtures() {
    let write = std::env::var_os("SYMSPEC_WRITE_DATA").is_some();
    for name in FIXTURE_NAMES {
        let expected = fixture_json(name).unwrap();
        let path = data_dir().join(format!("{name}.json"));
        if write {
            std::fs::create_dir_all(data_dir()).unwrap();
            std::fs::write(&path, expected.to_json_pretty()).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(DenseJson::parse(&text).unwrap(), expected, "{name}");
        assert_eq!(text, expected.to_json_pretty(), "{name} formatting");
    }
}

#[test]
fn unknown_fixture() {
    assert!(fixture_json("nope").is_none());
}
