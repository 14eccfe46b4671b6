//! Scenario replay files come from disk, so deserialization must never panic:
//! arbitrary JSON either yields a structurally valid scenario or a structured
//! error. Accepted scenarios get their cheap accessors exercised and must
//! survive a serialize/deserialize round trip (validation guarantees every
//! float is finite, so JSON cannot lose information).

#![no_main]

use libfuzzer_sys::fuzz_target;
use sdql_sim::scenario::Scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = Scenario::from_json(text) {
        for ue in 0..scenario.ue_count() {
            let gain = scenario.serving_gain(ue);
            assert!(gain.0.is_finite() && gain.0 > 0.0);
        }
        let json = scenario.to_json().expect("accepted scenario serializes");
        let back = Scenario::from_json(&json).expect("own output re-parses");
        assert_eq!(scenario, back, "scenario round trip drifted");
    }
});
