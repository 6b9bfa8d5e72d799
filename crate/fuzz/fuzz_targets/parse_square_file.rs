#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(squares) = molscope::io::parse_squares(text) {
        // Accepted input must survive a format/parse round trip.
        let formatted = molscope::io::format_squares(&squares);
        let reparsed = molscope::io::parse_squares(&formatted).expect("round trip parses");
        assert_eq!(squares, reparsed);
    }
});
