#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mols) = molscope::io::parse_mols(text) {
        let formatted = molscope::io::format_mols(&mols);
        let reparsed = molscope::io::parse_mols(&formatted).expect("round trip parses");
        assert_eq!(mols, reparsed);
        // Parsed lists satisfy the orthogonality invariant; the joint
        // profile must therefore build cleanly.
        let _ = mols.profile().expect("profile of a valid list");
    }
});
