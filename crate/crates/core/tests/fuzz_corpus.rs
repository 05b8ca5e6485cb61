//! The checked-in fuzz seeds must keep parsing.

use std::fs;
use std::path::PathBuf;

use subsat::bench::parse_experiment;
use subsat::io::{parse_dimacs_xor, parse_graph, parse_linear, parse_oxr, parse_partition, serialize_dimacs_xor};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn dimacs_xor_seeds_round_trip() {
    for (p, text) in seeds("dimacs_xor") {
        let inst = parse_dimacs_xor(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(parse_dimacs_xor(&serialize_dimacs_xor(&inst)).unwrap(), inst);
    }
}

#[test]
fn other_seeds_parse() {
    for (p, text) in seeds("graph") {
        parse_graph(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("partition") {
        parse_partition(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("oxr") {
        parse_oxr(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("linear") {
        parse_linear(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("experiment") {
        parse_experiment(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
