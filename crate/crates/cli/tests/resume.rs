//! The checkpointed scan must produce exactly the representatives of a
//! plain scan, both from scratch and when resuming a half-finished run.

use molscope::species;
use molscope_cli::runner;

#[test]
fn checkpointed_scan_matches_plain_scan_and_resumes() {
    let n = 6;
    let dir = std::env::temp_dir().join(format!("molscope-resume-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();

    let mut expected = species::find_species_reps(n, 2);
    expected.sort_unstable_by(|a, b| a.0.cmp(&b.0));

    let mut fresh = runner::scan_with_checkpoint(n, 2, &dir).unwrap();
    fresh.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(fresh, expected);

    // Drop a suffix of the completed-unit log and resume; results must not
    // change and must not duplicate.
    let checkpoint = dir.join("checkpoint.txt");
    let lines: Vec<String> = std::fs::read_to_string(&checkpoint)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert!(!lines.is_empty());
    let keep = lines.len() / 2;
    std::fs::write(&checkpoint, lines[..keep].join("\n") + "\n").unwrap();
    // The representative log keeps every line; re-screened units would
    // append duplicates if resume re-ran finished work, so rebuild it to
    // match the truncated checkpoint the way an interrupted run would.
    let units = species::scan_units(n);
    let done: Vec<usize> = lines[..keep]
        .iter()
        .filter_map(|l| l.strip_prefix("unit ").and_then(|i| i.trim().parse().ok()))
        .collect();
    let mut partial = Vec::new();
    for &u in &done {
        species::screen_unit(n, &units[u], |sq, counts| partial.push((sq, counts)));
    }
    let reps_path = dir.join("reps_raw.txt");
    let text: String = partial
        .iter()
        .map(|(sq, c)| {
            let cells: String = sq.cells().iter().map(|x| char::from(b'0' + x)).collect();
            let mask: u8 = c
                .conj_hits
                .iter()
                .enumerate()
                .map(|(i, &h)| (h as u8) << i)
                .sum();
            format!("{cells} {} {} {mask}\n", c.par, c.atp)
        })
        .collect();
    std::fs::write(&reps_path, text).unwrap();

    let mut resumed = runner::scan_with_checkpoint(n, 2, &dir).unwrap();
    resumed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(resumed, expected);
    let _ = std::fs::remove_dir_all(&dir);
}
