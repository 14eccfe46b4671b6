//! Q-table snapshots are loaded back for warm starts, so deserialization must
//! never panic: arbitrary JSON either yields consistently shaped tables or a
//! structured error. Accepted tables get their lookup paths exercised with
//! in-range states and actions, and must survive a round trip (validation
//! guarantees every value is finite).

#![no_main]

use libfuzzer_sys::fuzz_target;
use sdql_sim::sdql::DeepQTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(tables) = DeepQTable::from_json(text) {
        for t in &tables.tables {
            let bound = t.state_bound_db();
            let actions = [0, t.window_db()];
            for state in [-bound, 0, bound] {
                assert!(t.max_value(state, &actions).is_finite());
                assert!(actions.contains(&t.argmax(state, &actions)));
            }
        }
        let json = tables.to_json().expect("accepted tables serialize");
        let back = DeepQTable::from_json(&json).expect("own output re-parses");
        assert_eq!(tables, back, "table round trip drifted");
    }
});
