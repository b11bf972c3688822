#![no_main]

use libfuzzer_sys::fuzz_target;
use mcndgen_cli::config::resolve_config_with;
use mcndgen_cli::{DETGEN, STOGEN};

// Arguments are NUL-separated; `+F` files resolve to the same input.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let argv: Vec<String> = text.split('\0').map(String::from).collect();
        for spec in [&DETGEN, &STOGEN] {
            if let Ok(c) = resolve_config_with(spec, &argv, |_| Ok(text.to_string())) {
                let _ = c.echo();
            }
        }
    }
});
