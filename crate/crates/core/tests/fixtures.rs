use std::path::PathBuf;

use edgeshift::specfile::SpecFile;
use edgeshift::verify::{verify, Status, VerifyOptions};

fn fixtures() -> Vec<(String, SpecFile)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut out: Vec<(String, SpecFile)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, SpecFile::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn bundled_specs_verify() {
    let opts = VerifyOptions { max_n: 10, measure_len: 5, ..VerifyOptions::default() };
    let all = fixtures();
    assert!(all.len() >= 12);
    for (name, doc) in all {
        let spec = doc.to_spec().unwrap();
        let rep = verify(&spec, doc.expected.as_ref(), &opts).unwrap();
        if name.starts_with("corrupted") {
            assert!(!rep.passed(), "{name}");
            let c = rep.get("expected_f").unwrap();
            assert_eq!(c.status, Status::Fail);
            assert!(c.detail.contains("series mismatch"), "{}", c.detail);
        } else {
            let failed: Vec<_> = rep.checks.iter().filter(|c| c.status == Status::Fail).collect();
            assert!(failed.is_empty(), "{name}: {failed:?}");
        }
    }
}

#[test]
fn names_match_files() {
    for (name, doc) in fixtures() {
        assert_eq!(doc.name.as_deref(), Some(name.as_str()));
    }
}
