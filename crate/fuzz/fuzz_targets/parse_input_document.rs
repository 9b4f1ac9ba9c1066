//! Fuzzes the JSON input document parser and the structural validator:
//! arbitrary bytes must produce either a validated input or an error, never
//! a panic or a hang.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = silting::input::parse_document(text) else { return };
    let _ = silting::input::validate_document(&doc);
});
