#![no_main]

use hardwall_cli::config::parse_n_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(items) = parse_n_list(text) {
            assert!(!items.is_empty());
            assert!(items.windows(2).all(|w| w[0] < w[1]));
            assert!(items.iter().all(|&n| n > 0));
        }
    }
});
