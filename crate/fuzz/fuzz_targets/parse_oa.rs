#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(oa) = molscope::io::parse_oa(text) {
        let formatted = molscope::io::format_oa(&oa);
        let reparsed = molscope::io::parse_oa(&formatted).expect("round trip parses");
        assert_eq!(oa, reparsed);
        // Any accepted array reads back as a valid list of MOLS.
        let mols = molscope::mols::MolsList::from_oa(&oa, 0, 1).expect("valid array converts");
        assert_eq!(mols.order(), oa.order());
    }
});
