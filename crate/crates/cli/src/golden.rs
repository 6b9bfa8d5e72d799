//! Expected classification values for orders up to 8, used to self-verify
//! census runs. A row is (n, k, equality, isotopism, trisotopism,
//! paratopism); missing (n, k) combinations mean no such MOLS exist.

pub struct GoldenRow {
    pub n: usize,
    pub k: usize,
    pub equality: &'static str,
    pub isotopism: u64,
    pub trisotopism: u64,
    pub paratopism: u64,
}

macro_rules! rows {
    ($(($n:expr, $k:expr, $eq:expr, $iso:expr, $tri:expr, $par:expr)),* $(,)?) => {
        &[$(GoldenRow { n: $n, k: $k, equality: $eq, isotopism: $iso, trisotopism: $tri, paratopism: $par }),*]
    };
}

/// Reduced sets of MOLS, all (maximal and not).
pub const SETS_ALL: &[GoldenRow] = rows![
    (2, 1, "1", 1, 1, 1),
    (3, 1, "1", 1, 1, 1),
    (3, 2, "1", 1, 1, 1),
    (4, 1, "4", 2, 2, 2),
    (4, 2, "2", 1, 1, 1),
    (4, 3, "1", 1, 1, 1),
    (5, 1, "56", 2, 2, 2),
    (5, 2, "18", 2, 2, 1),
    (5, 3, "18", 1, 1, 1),
    (5, 4, "6", 1, 1, 1),
    (6, 1, "9408", 22, 17, 12),
    (7, 1, "16942080", 564, 324, 147),
    (7, 2, "342480", 20, 14, 7),
    (7, 3, "1200", 4, 3, 1),
    (7, 4, "1200", 3, 3, 1),
    (7, 5, "600", 1, 1, 1),
    (7, 6, "120", 1, 1, 1),
    (8, 1, "535281401856", 1676267, 842227, 283657),
    (8, 2, "7850589120", 23362, 11887, 2165),
    (8, 3, "14927040", 224, 149, 39),
    (8, 4, "4800", 3, 2, 1),
    (8, 5, "3600", 1, 1, 1),
    (8, 6, "1440", 1, 1, 1),
    (8, 7, "240", 1, 1, 1),
];

/// Reduced sets of maximal MOLS.
pub const SETS_MAXIMAL: &[GoldenRow] = rows![
    (2, 1, "1", 1, 1, 1),
    (3, 2, "1", 1, 1, 1),
    (4, 1, "3", 1, 1, 1),
    (4, 3, "1", 1, 1, 1),
    (5, 1, "50", 1, 1, 1),
    (5, 4, "6", 1, 1, 1),
    (6, 1, "9408", 22, 17, 12),
    (7, 1, "16765350", 549, 314, 141),
    (7, 2, "341880", 17, 11, 5),
    (7, 6, "120", 1, 1, 1),
    (8, 1, "532807827816", 1665394, 836595, 281633),
    (8, 2, "7832534400", 23005, 11704, 2127),
    (8, 3, "14923440", 221, 147, 38),
    (8, 7, "240", 1, 1, 1),
];

/// Reduced lists of MOLS, all.
pub const LISTS_ALL: &[GoldenRow] = rows![
    (2, 1, "1", 1, 1, 1),
    (3, 1, "1", 1, 1, 1),
    (3, 2, "1", 1, 1, 1),
    (4, 1, "4", 2, 2, 2),
    (4, 2, "2", 1, 1, 1),
    (4, 3, "2", 1, 1, 1),
    (5, 1, "56", 2, 2, 2),
    (5, 2, "18", 3, 2, 1),
    (5, 3, "36", 6, 3, 1),
    (5, 4, "36", 6, 3, 1),
    (6, 1, "9408", 22, 17, 12),
    (7, 1, "16942080", 564, 324, 147),
    (7, 2, "342480", 34, 20, 7),
    (7, 3, "2400", 20, 10, 1),
    (7, 4, "7200", 60, 30, 1),
    (7, 5, "14400", 120, 60, 1),
    (7, 6, "14400", 120, 60, 1),
    (8, 1, "535281401856", 1676267, 842227, 283657),
    (8, 2, "7850589120", 45927, 23362, 2165),
    (8, 3, "29854080", 1227, 621, 39),
    (8, 4, "28800", 40, 20, 1),
    (8, 5, "86400", 120, 60, 1),
    (8, 6, "172800", 240, 120, 1),
    (8, 7, "172800", 240, 120, 1),
];

/// Reduced lists of maximal MOLS.
pub const LISTS_MAXIMAL: &[GoldenRow] = rows![
    (2, 1, "1", 1, 1, 1),
    (3, 2, "1", 1, 1, 1),
    (4, 1, "3", 1, 1, 1),
    (4, 3, "2", 1, 1, 1),
    (5, 1, "50", 1, 1, 1),
    (5, 4, "36", 6, 3, 1),
    (6, 1, "9408", 22, 17, 12),
    (7, 1, "16765350", 549, 314, 141),
    (7, 2, "341880", 29, 17, 5),
    (7, 6, "14400", 120, 60, 1),
    (8, 1, "532807827816", 1665394, 836595, 281633),
    (8, 2, "7832534400", 45222, 23005, 2127),
    (8, 3, "29846880", 1217, 616, 38),
    (8, 7, "172800", 240, 120, 1),
];

/// Total reduced squares per order (the k = 1 equality column).
pub fn reduced_squares(n: usize) -> Option<&'static str> {
    match n {
        2 => Some("1"),
        3 => Some("1"),
        4 => Some("4"),
        5 => Some("56"),
        6 => Some("9408"),
        7 => Some("16942080"),
        8 => Some("535281401856"),
        _ => None,
    }
}

/// (probability of a mate, expected mates) for a uniformly random square.
pub fn random_square_stats(n: usize) -> Option<(&'static str, &'static str)> {
    match n {
        3 => Some(("1", "1")),
        4 => Some(("1/4", "1/2")),
        5 => Some(("3/28", "9/28")),
        6 => Some(("0", "0")),
        7 => Some(("5891/564736", "1427/70592")),
        8 => Some(("103065585/22303391744", "40888485/2787923968")),
        _ => None,
    }
}

/// Common-transversal histograms for maximal pair species:
/// ((#common, #max disjoint) -> species count).
pub fn common_transversal_hist(n: usize) -> Option<&'static [((u64, u64), u64)]> {
    match n {
        7 => Some(&[((0, 0), 1), ((1, 1), 1), ((2, 1), 1), ((4, 1), 2)]),
        8 => Some(&[
            ((0, 0), 1980),
            ((1, 1), 23),
            ((2, 1), 10),
            ((2, 2), 60),
            ((3, 1), 1),
            ((4, 2), 16),
            ((4, 4), 26),
            ((8, 2), 1),
            ((8, 4), 7),
            ((12, 2), 1),
            ((12, 4), 1),
            ((19, 2), 1),
        ]),
        _ => None,
    }
}

/// Species-involvement histograms (distinct square species among aspects ->
/// species count) for maximal MOLS.
pub fn involvement_hist(n: usize, k: usize) -> Option<&'static [(usize, u64)]> {
    match (n, k) {
        (7, 2) => Some(&[(1, 2), (2, 2), (3, 1)]),
        (7, 6) => Some(&[(1, 1)]),
        (8, 2) => Some(&[(1, 4), (2, 82), (3, 512), (4, 1529)]),
        (8, 3) => Some(&[(1, 1), (2, 6), (3, 13), (4, 16), (5, 2)]),
        (8, 7) => Some(&[(1, 1)]),
        _ => None,
    }
}

pub fn lookup(table: &'static [GoldenRow], n: usize, k: usize) -> Option<&'static GoldenRow> {
    table.iter().find(|r| r.n == n && r.k == k)
}

/// Histogram of non-bachelor species by floor(log2(mates)).
pub fn log2_theta_hist(n: usize) -> Option<&'static [(u32, u64)]> {
    match n {
        7 => Some(&[(0, 1), (1, 3), (3, 1), (9, 1)]),
        8 => Some(&[
            (0, 1223),
            (1, 329),
            (2, 175),
            (3, 90),
            (4, 67),
            (5, 49),
            (6, 31),
            (7, 17),
            (8, 15),
            (9, 7),
            (10, 4),
            (11, 6),
            (12, 5),
            (13, 1),
            (14, 3),
            (15, 1),
            (16, 1),
        ]),
        _ => None,
    }
}

/// The largest mate counts of one order, descending.
pub fn top_theta(n: usize) -> Option<&'static [u64]> {
    match n {
        8 => Some(&[70272, 33408, 32256, 23232, 23040, 12048]),
        _ => None,
    }
}
