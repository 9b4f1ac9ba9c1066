//! Fuzzes scalar literal parsing over both supported fields.

#![no_main]

use libfuzzer_sys::fuzz_target;
use silting::exactla::Field;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Cap the digit count: arbitrary-precision parsing is linear but the
    // fuzzer should spend its budget on structure, not on long integers.
    if text.len() > 4096 {
        return;
    }
    let _ = Field::Rational.parse(text);
    if let Ok(fp) = Field::prime(101) {
        let _ = fp.parse(text);
    }
});
