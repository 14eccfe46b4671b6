//! Trial reports are re-read by `replay` and `summarize`, so deserialization
//! must never panic on damaged or adversarial files. Reports carry no
//! validator (replay checks them semantically against a rerun), so the
//! harness only requires that parsing is total and accepted reports
//! re-serialize without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sdql_sim::metrics::TrialReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = TrialReport::from_json(text) {
        let _ = report.to_json();
    }
});
