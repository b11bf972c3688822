#![no_main]

use libfuzzer_sys::fuzz_target;
use mcndgen_cli::config::parse_config_text;
use mcndgen_cli::{DETGEN, STOGEN};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_config_text(&DETGEN, "fuzz", text);
        let _ = parse_config_text(&STOGEN, "fuzz", text);
    }
});
