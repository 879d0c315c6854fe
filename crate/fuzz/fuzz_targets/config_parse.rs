#![no_main]

use hardwall_cli::config::{canonical_text, config_from_text, parse_raw};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // the raw parser must never panic
        let _ = parse_raw(text);
        // a config that validates must echo to a fixed point
        if let Ok(cfg) = config_from_text(text) {
            let echo = canonical_text(&cfg);
            let cfg2 = config_from_text(&echo).expect("canonical echo must re-parse");
            assert_eq!(echo, canonical_text(&cfg2));
        }
    }
});
