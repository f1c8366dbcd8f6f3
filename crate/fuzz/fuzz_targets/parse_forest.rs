#![no_main]

use libfuzzer_sys::fuzz_target;
use pathdepth::forest::EliminationForest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = EliminationForest::parse(text) {
        if f.height().is_ok() {
            let again = EliminationForest::parse(&f.to_text()).expect("serialized forest parses");
            assert_eq!(again, f);
        }
    }
});
