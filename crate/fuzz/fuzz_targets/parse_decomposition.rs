#![no_main]

use libfuzzer_sys::fuzz_target;
use pathdepth::decomposition::PathDecomposition;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pd) = PathDecomposition::parse(text) {
        let again = PathDecomposition::parse(&pd.to_text()).expect("serialized decomposition parses");
        assert_eq!(again, pd);
        let _ = pd.occurrence_ranges(64);
    }
});
