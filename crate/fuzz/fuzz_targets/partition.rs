#![no_main]

use libfuzzer_sys::fuzz_target;

/// Skips inputs naming counts or indices above 4096, which would only
/// exercise allocation.
fn small(s: &str) -> bool {
    s.split_ascii_whitespace()
        .filter_map(|t| t.trim_start_matches(['x', '-']).parse::<u64>().ok())
        .all(|v| v <= 4096)
}

fuzz_target!(|data: &[u8]| {
    if let Some(s) = std::str::from_utf8(data).ok().filter(|s| small(s)) {
        let _ = subsat::io::parse_partition(s);
    }
});
