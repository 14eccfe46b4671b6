//! Config parsing must never panic: arbitrary TOML either yields a valid,
//! re-serializable experiment or a structured error.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sdql_sim::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ExperimentConfig::from_toml_str(text) {
        // An accepted document must survive its own echo.
        let echoed = config.to_toml_string().expect("accepted config serializes");
        let back = ExperimentConfig::from_toml_str(&echoed).expect("echo re-parses");
        assert_eq!(config, back, "config echo round trip drifted");
    }
});
