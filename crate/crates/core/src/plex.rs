//! Bit-parallel enumeration of p-plexes and p-partitions.
//!
//! The cell profile packs, for each cell, one bit for its column and one bit
//! per square for its symbol. A p-plex then corresponds to choosing p cells
//! per row so that no packed component is covered more than p times, and the
//! backtracking tracks coverage with one occupancy word per multiplicity.
//! Plexes are stored as n^2-bit cell sets so disjointness is one AND.

use crate::latin::LatinSquare;
use crate::mols::MolsList;
use std::ops::ControlFlow;
use thiserror::Error;

/// Default limit on stored plexes before a search aborts.
pub const DEFAULT_CATALOGUE_CAP: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlexError {
    #[error("profile needs {bits} bits, more than the 128-bit word")]
    WidthExceeded { bits: usize },
    #[error("catalogue exceeded cap of {cap} plexes")]
    CatalogueOverflow { cap: usize },
    #[error("p = {p} out of range for order {n}")]
    InvalidP { p: usize, n: usize },
    #[error("p = {p} does not divide order {n}")]
    PNotDividing { p: usize, n: usize },
    #[error("square has no transversals")]
    NoTransversals,
}

/// The packed cell profile of a MOLS list: entry (r, c) has bit c set plus
/// bit i*n + s for each square i (1-based) holding symbol s there.
#[derive(Debug, Clone)]
pub struct Profile {
    n: usize,
    k: usize,
    words: Vec<u128>,
}

impl Profile {
    pub fn build(m: &MolsList) -> Result<Profile, PlexError> {
        let n = m.order();
        let k = m.len();
        let bits = (k + 1) * n;
        if bits > 128 {
            return Err(PlexError::WidthExceeded { bits });
        }
        let mut words = vec![0u128; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut w = 1u128 << c;
                for (i, sq) in m.squares().iter().enumerate() {
                    w |= 1u128 << ((i + 1) * n + sq.get(r, c) as usize);
                }
                words[r * n + c] = w;
            }
        }
        Ok(Profile { n, k, words })
    }

    pub fn for_square(l: &LatinSquare) -> Profile {
        Profile::build(&MolsList::single(l.clone())).expect("single square fits in 128 bits")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn squares(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn word(&self, r: usize, c: usize) -> u128 {
        self.words[r * self.n + c]
    }
}

/// A p-plex as an n^2-bit cell set; bit r*n + c is cell (r, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plex {
    cells: u128,
}

impl Plex {
    pub fn cells(&self) -> u128 {
        self.cells
    }

    pub fn contains(&self, r: usize, c: usize, n: usize) -> bool {
        self.cells >> (r * n + c) & 1 == 1
    }

    pub fn is_disjoint(&self, other: &Plex) -> bool {
        self.cells & other.cells == 0
    }

    /// Cell indices r*n + c, ascending.
    pub fn cell_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut m = self.cells;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(b)
            }
        })
    }
}

/// All p-plexes of a profile in lexicographic order of per-row cell choices,
/// with the row-skip table `T`: `skip(i, r)` is the index of the first later
/// plex whose row-r cells differ from plex i's.
#[derive(Debug, Clone)]
pub struct PlexCatalogue {
    n: usize,
    p: usize,
    plexes: Vec<Plex>,
    skip: Vec<u32>,
}

impl PlexCatalogue {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.plexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plexes.is_empty()
    }

    pub fn plexes(&self) -> &[Plex] {
        &self.plexes
    }

    #[inline]
    pub fn skip(&self, plex: usize, row: usize) -> usize {
        self.skip[plex * self.n + row] as usize
    }

    /// Start index of each row-0 group; for p = 1, group t holds exactly the
    /// transversals through cell (0, t).
    fn row0_groups(&self) -> Vec<usize> {
        let n = self.n;
        let mut bounds = vec![self.plexes.len(); n + 1];
        bounds[0] = 0;
        let mut next = 1;
        for (i, p) in self.plexes.iter().enumerate() {
            let c0 = p.cells.trailing_zeros() as usize; // first cell is in row 0
            while next <= c0 {
                bounds[next] = i;
                next += 1;
            }
        }
        bounds
    }
}

fn row_mask(n: usize, r: usize) -> u128 {
    ((1u128 << n) - 1) << (r * n)
}

struct PlexSearch<'a> {
    prof: &'a Profile,
    p: usize,
    cap: usize,
    occupancy: Vec<u128>,
    cells: u128,
    out: Vec<Plex>,
}

impl PlexSearch<'_> {
    fn run(&mut self) -> Result<(), PlexError> {
        self.row(0)
    }

    fn row(&mut self, r: usize) -> Result<(), PlexError> {
        if r == self.prof.n {
            if self.out.len() == self.cap {
                return Err(PlexError::CatalogueOverflow { cap: self.cap });
            }
            self.out.push(Plex { cells: self.cells });
            return Ok(());
        }
        self.pick(r, 0, 0)
    }

    fn pick(&mut self, r: usize, start: usize, chosen: usize) -> Result<(), PlexError> {
        if chosen == self.p {
            return self.row(r + 1);
        }
        let n = self.prof.n;
        let need = self.p - chosen;
        for c in start..=n - need {
            let w = self.prof.word(r, c);
            if w & self.occupancy[self.p - 1] != 0 {
                continue;
            }
            let saved: Vec<u128> = self.occupancy.clone();
            for i in (1..self.p).rev() {
                self.occupancy[i] |= self.occupancy[i - 1] & w;
            }
            self.occupancy[0] |= w;
            self.cells |= 1u128 << (r * n + c);
            self.pick(r, c + 1, chosen + 1)?;
            self.cells &= !(1u128 << (r * n + c));
            self.occupancy = saved;
        }
        Ok(())
    }
}

/// Enumerates every p-plex into a catalogue, with the default storage cap.
pub fn enumerate_plexes(prof: &Profile, p: usize) -> Result<PlexCatalogue, PlexError> {
    enumerate_plexes_capped(prof, p, DEFAULT_CATALOGUE_CAP)
}

pub fn enumerate_plexes_capped(
    prof: &Profile,
    p: usize,
    cap: usize,
) -> Result<PlexCatalogue, PlexError> {
    let n = prof.n;
    if p < 1 || p > n {
        return Err(PlexError::InvalidP { p, n });
    }
    let mut search = PlexSearch {
        prof,
        p,
        cap,
        occupancy: vec![0u128; p],
        cells: 0,
        out: Vec::new(),
    };
    search.run()?;
    let plexes = search.out;
    // Skip table, built back to front: if the next plex agrees on row r, it
    // shares the answer; otherwise the answer is simply the next index.
    let len = plexes.len();
    let mut skip = vec![len as u32; len * n];
    for i in (0..len.saturating_sub(1)).rev() {
        for r in 0..n {
            let mask = row_mask(n, r);
            skip[i * n + r] = if plexes[i + 1].cells & mask == plexes[i].cells & mask {
                skip[(i + 1) * n + r]
            } else {
                (i + 1) as u32
            };
        }
    }
    Ok(PlexCatalogue { n, p, plexes, skip })
}

/// Counts p-plexes without storing them (no cap needed).
pub fn count_plexes(prof: &Profile, p: usize) -> Result<u64, PlexError> {
    let n = prof.n;
    if p < 1 || p > n {
        return Err(PlexError::InvalidP { p, n });
    }
    fn pick(
        prof: &Profile,
        p: usize,
        r: usize,
        start: usize,
        chosen: usize,
        occ: &mut [u128],
        count: &mut u64,
    ) {
        let n = prof.n;
        if chosen == p {
            if r + 1 == n {
                *count += 1;
            } else {
                pick(prof, p, r + 1, 0, 0, occ, count);
            }
            return;
        }
        let need = p - chosen;
        for c in start..=n - need {
            let w = prof.word(r, c);
            if w & occ[p - 1] != 0 {
                continue;
            }
            let saved = occ.to_vec();
            for i in (1..p).rev() {
                occ[i] |= occ[i - 1] & w;
            }
            occ[0] |= w;
            pick(prof, p, r, c + 1, chosen + 1, occ, count);
            occ.copy_from_slice(&saved);
        }
    }
    let mut count = 0;
    if n == 0 {
        return Ok(0);
    }
    let mut occ = vec![0u128; p];
    pick(prof, p, 0, 0, 0, &mut occ, &mut count);
    Ok(count)
}

/// Counts the p-partitions of the catalogue's profile.
///
/// For p = 1 the i-th chosen transversal is pinned to cell (0, i) and the
/// scan skips over row conflicts with the `T` table; for general p the next
/// part must cover the first uncovered cell.
pub fn count_partitions(cat: &PlexCatalogue, p: usize) -> Result<u64, PlexError> {
    let n = cat.n;
    assert_eq!(p, cat.p, "catalogue was built for p = {}", cat.p);
    if !n.is_multiple_of(p) {
        return Err(PlexError::PNotDividing { p, n });
    }
    if p == 1 {
        return Ok(count_partitions_p1(cat));
    }
    let mut count = 0u64;
    general_partition_search(cat, &mut Vec::new(), &mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Visits every p-partition as a slice of catalogue indices (ascending parts
/// in the canonical search order). The callback may stop the enumeration.
pub fn for_each_partition<F>(cat: &PlexCatalogue, mut visit: F) -> Result<(), PlexError>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let n = cat.n;
    if !n.is_multiple_of(cat.p) {
        return Err(PlexError::PNotDividing { p: cat.p, n });
    }
    if cat.p == 1 {
        let bounds = cat.row0_groups();
        let mut chosen = Vec::with_capacity(n);
        let _ = p1_visit(cat, &bounds, 0, 0, &mut chosen, &mut visit);
    } else {
        general_partition_search(cat, &mut Vec::new(), &mut visit);
    }
    Ok(())
}

/// Above this catalogue size the quadratic disjointness matrix is skipped
/// and counting falls back to the catalogue scan.
const MATRIX_COUNT_LIMIT: usize = 100_000;

fn count_partitions_p1(cat: &PlexCatalogue) -> u64 {
    if cat.plexes.is_empty() {
        return 0;
    }
    let n = cat.n;
    if n == 1 {
        return 1;
    }
    if cat.len() > MATRIX_COUNT_LIMIT {
        return count_partitions_p1_scan(cat);
    }
    // Pairwise-disjointness bitsets per transversal, with the transversal
    // through cell (0, t) always drawn from the group with the fewest
    // remaining candidates. An empty group prunes the branch levels before
    // a left-to-right scan would notice.
    let count = cat.len();
    let words = count.div_ceil(64);
    let bounds = cat.row0_groups();
    let mut compat = vec![0u64; count * words];
    for i in 0..count {
        for j in i + 1..count {
            if cat.plexes[i].is_disjoint(&cat.plexes[j]) {
                compat[i * words + j / 64] |= 1 << (j % 64);
                compat[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut avail: Vec<u64> = (0..words)
        .map(|w| {
            let hi = count - w * 64;
            if hi >= 64 {
                u64::MAX
            } else {
                (1u64 << hi) - 1
            }
        })
        .collect();
    let mut scratch = vec![0u64; words * n];
    p1_count_mrv(&compat, &bounds, words, n, &mut avail, 0, &mut scratch)
}

fn group_popcount(avail: &[u64], start: usize, end: usize) -> u32 {
    if start >= end {
        return 0;
    }
    let ws = start / 64;
    let we = end.div_ceil(64);
    let mut total = 0;
    for (w, &raw) in avail.iter().enumerate().take(we).skip(ws) {
        let mut word = raw;
        if w == ws {
            word &= u64::MAX << (start % 64);
        }
        if w == we - 1 && !end.is_multiple_of(64) {
            word &= (1u64 << (end % 64)) - 1;
        }
        total += word.count_ones();
    }
    total
}

fn p1_count_mrv(
    compat: &[u64],
    bounds: &[usize],
    words: usize,
    n: usize,
    avail: &mut [u64],
    covered: u16,
    scratch: &mut [u64],
) -> u64 {
    let depth = covered.count_ones() as usize;
    if depth == n {
        return 1;
    }
    // Most-constrained uncovered group; a zero kills the branch outright.
    let mut best_t = usize::MAX;
    let mut best_count = u32::MAX;
    for t in 0..n {
        if covered >> t & 1 == 1 {
            continue;
        }
        let cnt = group_popcount(avail, bounds[t], bounds[t + 1]);
        if cnt == 0 {
            return 0;
        }
        if cnt < best_count {
            best_count = cnt;
            best_t = t;
        }
    }
    let (start, end) = (bounds[best_t], bounds[best_t + 1]);
    let (next_avail, rest) = scratch.split_at_mut(words);
    let mut sum = 0;
    let mut w = start / 64;
    while w * 64 < end {
        let mut word = avail[w];
        if w == start / 64 {
            word &= u64::MAX << (start % 64);
        }
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            word &= word - 1;
            let idx = w * 64 + bit;
            if idx >= end {
                break;
            }
            for (i, na) in next_avail.iter_mut().enumerate() {
                *na = avail[i] & compat[idx * words + i];
            }
            sum += p1_count_mrv(
                compat,
                bounds,
                words,
                n,
                next_avail,
                covered | 1 << best_t,
                rest,
            );
        }
        w += 1;
    }
    sum
}

/// The catalogue-scan counter: transversals chosen in first-row cell order,
/// stepping over row conflicts with the skip table. Kept as the exact
/// mirror of the enumeration path and as a cross-check of the
/// matrix-driven counter.
pub(crate) fn count_partitions_p1_scan(cat: &PlexCatalogue) -> u64 {
    if cat.plexes.is_empty() {
        return 0;
    }
    let bounds = cat.row0_groups();
    p1_scan_count(cat, &bounds, 0, 0)
}

fn p1_scan_count(cat: &PlexCatalogue, bounds: &[usize], t: usize, used: u128) -> u64 {
    let n = cat.n;
    if t == n {
        return 1;
    }
    let end = bounds[t + 1];
    let mut sum = 0;
    let mut idx = bounds[t];
    while idx < end {
        let cells = cat.plexes[idx].cells;
        let clash = cells & used;
        if clash == 0 {
            sum += p1_scan_count(cat, bounds, t + 1, used | cells);
            idx += 1;
        } else {
            let row = clash.trailing_zeros() as usize / n;
            idx = cat.skip(idx, row);
        }
    }
    sum
}

fn p1_visit<F>(
    cat: &PlexCatalogue,
    bounds: &[usize],
    t: usize,
    used: u128,
    chosen: &mut Vec<u32>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let n = cat.n;
    if t == n {
        return visit(chosen);
    }
    let end = bounds[t + 1];
    let mut idx = bounds[t];
    while idx < end {
        let cells = cat.plexes[idx].cells;
        let clash = cells & used;
        if clash == 0 {
            chosen.push(idx as u32);
            let flow = p1_visit(cat, bounds, t + 1, used | cells, chosen, visit);
            chosen.pop();
            flow?;
            idx += 1;
        } else {
            let row = clash.trailing_zeros() as usize / n;
            idx = cat.skip(idx, row);
        }
    }
    ControlFlow::Continue(())
}

fn general_partition_search<F>(cat: &PlexCatalogue, chosen: &mut Vec<u32>, visit: &mut F)
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let n = cat.n;
    let parts = n / cat.p;
    let full = if n * n == 128 {
        u128::MAX
    } else {
        (1u128 << (n * n)) - 1
    };
    let mut per_cell: Vec<Vec<u32>> = vec![Vec::new(); n * n];
    for (i, plex) in cat.plexes.iter().enumerate() {
        for cell in plex.cell_indices() {
            per_cell[cell].push(i as u32);
        }
    }
    fn rec<F>(
        cat: &PlexCatalogue,
        per_cell: &[Vec<u32>],
        full: u128,
        parts: usize,
        used: u128,
        chosen: &mut Vec<u32>,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if chosen.len() == parts {
            debug_assert_eq!(used, full);
            return visit(chosen);
        }
        let first_uncovered = (!used & full).trailing_zeros() as usize;
        for &idx in &per_cell[first_uncovered] {
            let cells = cat.plexes[idx as usize].cells;
            if cells & used == 0 {
                chosen.push(idx);
                let flow = rec(cat, per_cell, full, parts, used | cells, chosen, visit);
                chosen.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
    let _ = rec(cat, &per_cell, full, parts, 0, chosen, visit);
}

/// Number of 1-partitions of a single square; equivalently the number of its
/// orthogonal mates with first row in natural order.
pub fn theta(l: &LatinSquare) -> u64 {
    let prof = Profile::for_square(l);
    let cat = enumerate_plexes(&prof, 1).expect("transversal catalogues of order <= 10 are small");
    count_partitions(&cat, 1).expect("p = 1 divides every order")
}

/// Largest pairwise-disjoint family in a transversal catalogue, searched with
/// each new transversal using a first-row cell strictly to the right of the
/// previous one.
pub fn max_disjoint(cat: &PlexCatalogue) -> usize {
    assert_eq!(cat.p, 1, "max_disjoint expects a transversal catalogue");
    if cat.plexes.is_empty() {
        return 0;
    }
    let bounds = cat.row0_groups();
    let mut best = 0;
    fn rec(
        cat: &PlexCatalogue,
        bounds: &[usize],
        t: usize,
        used: u128,
        size: usize,
        best: &mut usize,
    ) {
        let n = cat.n;
        *best = (*best).max(size);
        if *best == n || size + (n - t) <= *best {
            return;
        }
        for t2 in t..n {
            let mut idx = bounds[t2];
            let end = bounds[t2 + 1];
            while idx < end {
                let cells = cat.plexes[idx].cells;
                let clash = cells & used;
                if clash == 0 {
                    rec(cat, bounds, t2 + 1, used | cells, size + 1, best);
                    if *best == n {
                        return;
                    }
                    idx += 1;
                } else {
                    let row = clash.trailing_zeros() as usize / n;
                    idx = cat.skip(idx, row);
                }
            }
        }
    }
    rec(cat, &bounds, 0, 0, 0, &mut best);
    best
}

/// Smallest cardinality of an inclusion-maximal family of pairwise-disjoint
/// transversals.
pub fn alpha(l: &LatinSquare) -> Result<usize, PlexError> {
    let prof = Profile::for_square(l);
    let cat = enumerate_plexes(&prof, 1)?;
    if cat.is_empty() {
        return Err(PlexError::NoTransversals);
    }
    let count = cat.len();
    let words = count.div_ceil(64);
    // Pairwise disjointness graph over the catalogue.
    let mut compat = vec![0u64; count * words];
    for i in 0..count {
        for j in i + 1..count {
            if cat.plexes[i].is_disjoint(&cat.plexes[j]) {
                compat[i * words + j / 64] |= 1 << (j % 64);
                compat[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    // Greedy maximal family bounds the answer from above.
    let mut best = {
        let mut used = 0u128;
        let mut size = 0usize;
        for p in &cat.plexes {
            if p.cells & used == 0 {
                used |= p.cells;
                size += 1;
            }
        }
        size
    };
    let all: Vec<u64> = (0..words)
        .map(|w| {
            let hi = count - w * 64;
            if hi >= 64 {
                u64::MAX
            } else {
                (1u64 << hi) - 1
            }
        })
        .collect();
    let mut candidates = all;
    rec_alpha(&compat, words, &mut candidates, 0, 0, &mut best);
    Ok(best)
}

fn rec_alpha(
    compat: &[u64],
    words: usize,
    candidates: &mut [u64],
    min_idx: usize,
    size: usize,
    best: &mut usize,
) {
    if candidates.iter().all(|&w| w == 0) {
        *best = (*best).min(size);
        return;
    }
    if size + 1 >= *best {
        return;
    }
    // iterate candidate indices >= min_idx
    let mut w = min_idx / 64;
    let mut mask = candidates
        .get(w)
        .map_or(0, |&x| x & (u64::MAX << (min_idx % 64)));
    while w < words {
        while mask != 0 {
            let bit = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let j = w * 64 + bit;
            let mut next: Vec<u64> = (0..words)
                .map(|i| candidates[i] & compat[j * words + i])
                .collect();
            rec_alpha(compat, words, &mut next, j + 1, size + 1, best);
        }
        w += 1;
        if w < words {
            mask = candidates[w];
        }
    }
}
