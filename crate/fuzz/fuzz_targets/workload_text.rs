#![no_main]

use libfuzzer_sys::fuzz_target;

use dls::label_space::{ContentSchema, DimensionSpec};

fn fixed_schema() -> ContentSchema {
    ContentSchema::new(
        vec![
            DimensionSpec::range("a1", 0, 1023, 4).unwrap(),
            DimensionSpec::range("a2", 0, 1023, 4).unwrap(),
        ],
        0,
    )
    .unwrap()
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let schema = fixed_schema();
        if let Ok(workload) = dls::harness::parse_workload(text, &schema) {
            // Accepted records are valid against the schema by contract.
            for sub in &workload.subscriptions {
                sub.normalize(&schema)
                    .expect("parsed subscription normalizes");
            }
            for event in &workload.events {
                event.validate(&schema).expect("parsed event validates");
            }
        }
    }
});
