#![no_main]

use libfuzzer_sys::fuzz_target;

/// Skips inputs naming counts or indices above 4096, which would only
/// exercise allocation.
fn small(s: &str) -> bool {
    s.split_ascii_whitespace()
        .filter_map(|t| t.trim_start_matches(['x', '-']).parse::<u64>().ok())
        .all(|v| v <= 4096)
}
use subsat::io::{parse_dimacs_xor, serialize_dimacs_xor};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 4096 || !small(s) {
        return;
    }
    if let Ok(inst) = parse_dimacs_xor(s) {
        let text = serialize_dimacs_xor(&inst);
        let again = parse_dimacs_xor(&text).expect("serialized instance parses");
        assert_eq!(again, inst);
    }
});
