#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(schema) = dls::label_space::parse_schema(text) {
            // Accepted schemas must serialize and re-parse to themselves.
            let rendered = dls::label_space::schema_to_text(&schema);
            let back = dls::label_space::parse_schema(&rendered).expect("rendered schema parses");
            assert_eq!(back, schema);
        }
    }
});
