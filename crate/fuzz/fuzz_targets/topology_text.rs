#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(topology) = dls::overlay::parse_topology(text) {
            let rendered = dls::overlay::topology_to_text(&topology);
            let back = dls::overlay::parse_topology(&rendered).expect("rendered topology parses");
            assert_eq!(back, topology);
            // Anything the parser accepts must build into a network.
            let _ = dls::overlay::build(&topology);
        }
    }
});
