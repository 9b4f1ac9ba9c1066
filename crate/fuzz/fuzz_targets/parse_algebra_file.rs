//! Fuzzes the serialized-algebra reader: the file format emitted by the
//! ext-algebra command and accepted by koszul-check. Every deserialized
//! structure passes through full validation, including the identity
//! checkers, which must reject rather than crash.

#![no_main]

use libfuzzer_sys::fuzz_target;
use silting::input::AlgebraFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = serde_json::from_str::<AlgebraFile>(text) else { return };
    let _ = file.to_algebra();
});
