#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(filter) = dls::cbf::CountingBloomFilter::from_snapshot(data) {
        // Snapshot decoding is byte-exact: accepted input re-serializes to
        // itself, and the filter stays usable.
        assert_eq!(filter.snapshot(), data);
        let _ = filter.query(dls::label_space::RangeLabel(0));
    }
});
