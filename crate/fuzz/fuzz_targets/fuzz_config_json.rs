//! The scenario-config parser is the one surface that consumes untrusted
//! bytes; parsing plus validation must never panic and must reject absurd
//! resource demands.

#![no_main]

use libfuzzer_sys::fuzz_target;

use enantiosim_cli::config::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = ScenarioConfig::from_json_str(s) {
            // accepted configs must survive a serialize/parse round trip
            let back = ScenarioConfig::from_json_str(&cfg.to_json_string())
                .expect("round trip of a validated config");
            assert_eq!(cfg, back);
        }
    }
});
