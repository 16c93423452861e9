//! Support shared by the integration tests: the corpus, random inputs and
//! independent oracles.
#![allow(dead_code)]

pub mod earley;
pub mod gen;
pub mod hm;
pub mod search;

use std::path::{Path, PathBuf};

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

/// `(file name, text)` pairs of one corpus subdirectory, sorted by name.
pub fn corpus(sub: &str) -> Vec<(String, String)> {
    let dir = tests_dir().join("corpus").join(sub);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mml"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

pub fn well_typed() -> Vec<(String, String)> {
    corpus("ok")
}

pub fn broken() -> Vec<(String, String)> {
    corpus("broken")
}

pub fn all_buffers() -> Vec<(String, String)> {
    let mut v = well_typed();
    v.extend(broken());
    v
}

/// Reads a golden file, or writes `actual` to it when `UPDATE_GOLDEN` is set
/// or the file is missing.
pub fn golden(name: &str, actual: &str) -> String {
    let p = tests_dir().join("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() || !p.exists() {
        std::fs::write(&p, actual).unwrap();
    }
    std::fs::read_to_string(&p).unwrap()
}
