#![no_main]

use libfuzzer_sys::fuzz_target;

// First byte picks the label width in bits; the rest is the message.
fuzz_target!(|data: &[u8]| {
    let Some((&width_byte, body)) = data.split_first() else {
        return;
    };
    let label_bits = (width_byte as u32 % 64) + 1;
    if let Ok(msg) = dls::broker::decode_message(body, label_bits) {
        let bytes = dls::broker::encode_message(&msg, label_bits).expect("decoded message encodes");
        let back =
            dls::broker::decode_message(&bytes, label_bits).expect("encoded message decodes");
        assert_eq!(back, msg);
    }
});
