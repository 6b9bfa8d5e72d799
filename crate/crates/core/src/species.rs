//! Species representatives of latin squares by exhaustive enumeration of
//! reduced squares.
//!
//! The representative of a species is its lexicographically least reduced
//! member. Screening a candidate S asks whether its species has a smaller
//! reduced member. Every reduced member arises from a conjugate X of S, a
//! row r of X sent to row 0, and a symbol permutation sigma (columns are
//! then forced to put row 0 in order, rows to put column 0 in order). Row 1
//! of the image is sigma * rho * sigma^{-1}, where rho is the permutation
//! mapping row r of X onto the row that lands second; so the least
//! achievable row 1 for a given (X, r, u) depends only on the cycle type of
//! rho — its "block form", cycles laid out consecutively by ascending
//! length. Comparing block forms against S's row 1 rejects almost every
//! candidate before any sigma is built, and enumerating the few surviving
//! sigmas (cycle-to-cycle assignments with rotations) settles the rest.
//!
//! The same parametrization gives |par(S)| for free: the number of
//! (X, r, sigma) triples whose image is S itself.

use crate::latin::{LatinSquare, MAX_ORDER};
use crate::mols::MolsList;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

const MAX_CELLS: usize = MAX_ORDER * MAX_ORDER;

/// All partitions of n into parts of size at least 2 (cycle types of
/// fixed-point-free permutations), each realized as its block-form row:
/// ascending cycle lengths laid out as consecutive cycles. Sorted
/// lexicographically, these are the only possible first rows of a species
/// representative.
pub fn block_row1_patterns(n: usize) -> Vec<Vec<u8>> {
    let mut parts = Vec::new();
    let mut out = Vec::new();
    fn rec(remaining: usize, min: usize, parts: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining == 0 {
            out.push(block_form(parts));
            return;
        }
        for p in min..=remaining {
            if remaining - p != 1 {
                parts.push(p as u8);
                rec(remaining - p, p, parts, out);
                parts.pop();
            }
        }
    }
    rec(n, 2, &mut parts, &mut out);
    out.sort_unstable();
    out
}

/// One-line form of the least permutation with the given cycle type
/// (ascending lengths, no fixed points) that maps 0 to 1: consecutive
/// blocks, each a cyclic shift.
pub fn block_form(lengths_ascending: &[u8]) -> Vec<u8> {
    let mut row = Vec::new();
    let mut base = 0u8;
    for &len in lengths_ascending {
        debug_assert!(len >= 2);
        for i in 0..len {
            row.push(base + (i + 1) % len);
        }
        base += len;
    }
    row
}

// ---------------------------------------------------------------------------
// Reduced-square enumeration.

struct Enumerator<'a, F: FnMut(&[u8])> {
    n: usize,
    cells: [u8; MAX_CELLS],
    col_used: [u16; MAX_ORDER],
    visit: &'a mut F,
}

impl<F: FnMut(&[u8])> Enumerator<'_, F> {
    fn seed(n: usize, visit: &mut F) -> Enumerator<'_, F> {
        let mut e = Enumerator {
            n,
            cells: [0; MAX_CELLS],
            col_used: [0; MAX_ORDER],
            visit,
        };
        for c in 0..n {
            e.cells[c] = c as u8;
            e.col_used[c] = 1 << c;
        }
        e
    }

    /// Places a full row (its column-0 cell must equal `r`).
    fn place_row(&mut self, r: usize, row: &[u8]) {
        debug_assert_eq!(row[0] as usize, r);
        for (c, &sym) in row.iter().enumerate().take(self.n) {
            self.cells[r * self.n + c] = sym;
            self.col_used[c] |= 1 << sym;
        }
    }

    fn run_from_row(&mut self, r: usize) {
        if r == self.n {
            (self.visit)(&self.cells[..self.n * self.n]);
            return;
        }
        self.cells[r * self.n] = r as u8;
        self.fill_cell(r, 1, 1 << r);
    }

    fn fill_cell(&mut self, r: usize, c: usize, row_used: u16) {
        if c == self.n {
            self.run_from_row(r + 1);
            return;
        }
        let full = (1u16 << self.n) - 1;
        let mut avail = full & !row_used & !self.col_used[c];
        while avail != 0 {
            let sym = avail.trailing_zeros() as u16;
            avail &= avail - 1;
            self.cells[r * self.n + c] = sym as u8;
            self.col_used[c] |= 1 << sym;
            self.fill_cell(r, c + 1, row_used | 1 << sym);
            self.col_used[c] &= !(1 << sym);
        }
    }
}

/// Visits every reduced square of order n in lexicographic order.
pub fn for_each_reduced_square<F: FnMut(&[u8])>(n: usize, mut visit: F) {
    assert!((1..=MAX_ORDER).contains(&n));
    let mut e = Enumerator::seed(n, &mut visit);
    e.run_from_row(1);
}

/// Visits every reduced square whose first rows extend the given prefix
/// (`prefix[i]` is row i + 1).
pub fn for_each_reduced_with_prefix<F: FnMut(&[u8])>(n: usize, prefix: &[Vec<u8>], mut visit: F) {
    let mut e = Enumerator::seed(n, &mut visit);
    for (i, row) in prefix.iter().enumerate() {
        e.place_row(i + 1, row);
    }
    e.run_from_row(prefix.len() + 1);
}

pub fn count_reduced_squares(n: usize) -> u64 {
    let mut count = 0u64;
    for_each_reduced_square(n, |_| count += 1);
    count
}

/// Work units for a species scan of order n: per unit, the fixed rows 1
/// and 2 of the reduced squares to enumerate (row 1 restricted to the block
/// patterns a representative can have). Units can be screened independently
/// and in any order, which is what the checkpointed long runs rely on.
pub fn scan_units(n: usize) -> Vec<Vec<Vec<u8>>> {
    scan_prefixes(n, &block_row1_patterns(n))
}

/// Screens one scan unit, reporting every species representative found.
pub fn screen_unit<F: FnMut(LatinSquare, GroupCounts)>(n: usize, unit: &[Vec<u8>], mut found: F) {
    let mut screener = Screener::new(n);
    for_each_reduced_with_prefix(n, unit, |cells| {
        if let Screen::Minimal(counts) = screener.screen(cells) {
            found(
                LatinSquare::validate(n, cells.to_vec()).expect("enumerated"),
                counts,
            );
        }
    });
}

/// Work units for a parallel scan: all valid (row 1, row 2) combinations
/// with row 1 drawn from `row1_choices`.
fn scan_prefixes(n: usize, row1_choices: &[Vec<u8>]) -> Vec<Vec<Vec<u8>>> {
    if n <= 3 {
        return row1_choices.iter().map(|r1| vec![r1.clone()]).collect();
    }
    let mut prefixes = Vec::new();
    for r1 in row1_choices {
        let mut col_used = [0u16; MAX_ORDER];
        for c in 0..n {
            col_used[c] = (1 << c) | (1 << r1[c]);
        }
        let mut row2 = vec![0u8; n];
        row2[0] = 2;
        fn rec(
            n: usize,
            c: usize,
            row_used: u16,
            col_used: &[u16],
            row2: &mut Vec<u8>,
            emit: &mut impl FnMut(&[u8]),
        ) {
            if c == n {
                emit(row2);
                return;
            }
            let full = (1u16 << n) - 1;
            let mut avail = full & !row_used & !col_used[c];
            while avail != 0 {
                let sym = avail.trailing_zeros() as u16;
                avail &= avail - 1;
                row2[c] = sym as u8;
                rec(n, c + 1, row_used | 1 << sym, col_used, row2, emit);
            }
        }
        rec(n, 1, 1 << 2, &col_used, &mut row2, &mut |row2: &[u8]| {
            prefixes.push(vec![r1.clone(), row2.to_vec()]);
        });
    }
    prefixes
}

// ---------------------------------------------------------------------------
// Species-minimality screening.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Screen {
    NotMinimal,
    Minimal(GroupCounts),
}

/// Symmetry data from a completed self-map count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupCounts {
    /// Autoparatopism group order: all self-maps.
    pub par: u64,
    /// Autotopism group order: self-maps that fix the conjugate.
    pub atp: u64,
    /// Which of the six conjugates admit self-maps; projecting them to
    /// column permutations of the width-3 array gives the column action.
    pub conj_hits: [bool; 6],
}

impl GroupCounts {
    /// The column action of the autoparatopism group on the three array
    /// columns, as explicit permutations.
    pub fn col_action(&self) -> Vec<Vec<u8>> {
        self.conj_hits
            .iter()
            .enumerate()
            .filter(|&(_, &hit)| hit)
            .map(|(x, _)| conjugate_column_perm(x).to_vec())
            .collect()
    }
}

/// Column permutation of the orthogonal array realized by conjugate x, in
/// the same indexing as [`LatinSquare::conjugates`]: position j of the
/// conjugate's array reads original column perm[j].
pub fn conjugate_column_perm(x: usize) -> [u8; 3] {
    match x {
        0 => [0, 1, 2], // (r, c, s)
        1 => [1, 0, 2], // (c, r, s)
        2 => [0, 2, 1], // (r, s, c)
        3 => [2, 1, 0], // (s, c, r)
        4 => [1, 2, 0], // (c, s, r)
        5 => [2, 0, 1], // (s, r, c)
        _ => unreachable!(),
    }
}

/// Scratch buffers for screening many squares without reallocating.
pub struct Screener {
    n: usize,
    /// Conjugate squares and their lookup tables, all row-major n*n.
    conj: [[u8; MAX_CELLS]; 6],
    /// pos_in_row[x][r*n + sym]: column where row r of conjugate x holds sym.
    pos_in_row: [[u8; MAX_CELLS]; 6],
    /// pos_in_col[x][c*n + sym]: row where column c of conjugate x holds sym.
    pos_in_col: [[u8; MAX_CELLS]; 6],
}

impl Screener {
    pub fn new(n: usize) -> Screener {
        assert!((1..=MAX_ORDER).contains(&n));
        Screener {
            n,
            conj: [[0; MAX_CELLS]; 6],
            pos_in_row: [[0; MAX_CELLS]; 6],
            pos_in_col: [[0; MAX_CELLS]; 6],
        }
    }

    fn load(&mut self, cells: &[u8]) {
        let n = self.n;
        for r in 0..n {
            for c in 0..n {
                let s = cells[r * n + c] as usize;
                self.conj[0][r * n + c] = s as u8;
                self.conj[1][c * n + r] = s as u8;
                self.conj[2][r * n + s] = c as u8;
                self.conj[3][s * n + c] = r as u8;
                self.conj[4][c * n + s] = r as u8;
                self.conj[5][s * n + r] = c as u8;
            }
        }
        for x in 0..6 {
            for r in 0..n {
                for c in 0..n {
                    let s = self.conj[x][r * n + c] as usize;
                    self.pos_in_row[x][r * n + s] = c as u8;
                    self.pos_in_col[x][c * n + s] = r as u8;
                }
            }
        }
    }

    /// Decides whether `cells` is the least reduced member of its species;
    /// if so, also reports its symmetry counts.
    pub fn screen(&mut self, cells: &[u8]) -> Screen {
        let n = self.n;
        if n == 1 {
            return Screen::Minimal(GroupCounts {
                par: 6,
                atp: 1,
                conj_hits: [true; 6],
            });
        }
        self.load(cells);
        let s_row1 = &cells[n..2 * n];
        let mut counts = GroupCounts::default();
        let mut rho = [0u8; MAX_ORDER];
        let mut block = [0u8; MAX_ORDER];
        for x in 0..6 {
            for r in 0..n {
                for u in 0..n {
                    if u == r {
                        continue;
                    }
                    for c in 0..n {
                        rho[self.conj[x][r * n + c] as usize] = self.conj[x][u * n + c];
                    }
                    match block_vs_target(&rho[..n], s_row1, &mut block) {
                        Ordering::Less => return Screen::NotMinimal,
                        Ordering::Greater => continue,
                        Ordering::Equal => {}
                    }
                    if self.deep_compare(cells, x, r, &rho[..n], s_row1, &mut counts)
                        == Ordering::Less
                    {
                        return Screen::NotMinimal;
                    }
                }
            }
        }
        Screen::Minimal(counts)
    }

    /// For every sigma conjugating rho onto the target row permutation,
    /// compares the reduced image against S. Counts exact self-hits in
    /// `par`; returns Less as soon as any image beats S.
    fn deep_compare(
        &self,
        cells: &[u8],
        x: usize,
        r: usize,
        rho: &[u8],
        target: &[u8],
        counts: &mut GroupCounts,
    ) -> Ordering {
        let rho_cycles = cycles_of(rho);
        let pi_cycles = cycles_of(target);
        // Assign each rho-cycle to an unused target cycle of equal length,
        // in every rotation; each assignment fixes sigma on that cycle.
        let mut sigma = [0u8; MAX_ORDER];
        let mut used = [false; MAX_ORDER];
        self.assign(
            cells,
            x,
            r,
            &rho_cycles,
            &pi_cycles,
            0,
            &mut used,
            &mut sigma,
            counts,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        cells: &[u8],
        x: usize,
        r: usize,
        rho_cycles: &Cycles,
        pi_cycles: &Cycles,
        depth: usize,
        used: &mut [bool; MAX_ORDER],
        sigma: &mut [u8; MAX_ORDER],
        counts: &mut GroupCounts,
    ) -> Ordering {
        if depth == rho_cycles.count {
            return self.compare_image(cells, x, r, sigma, counts);
        }
        let (roff, rlen) = rho_cycles.bounds[depth];
        for q in 0..pi_cycles.count {
            let (poff, plen) = pi_cycles.bounds[q];
            if used[q] || plen != rlen {
                continue;
            }
            used[q] = true;
            for rot in 0..rlen {
                for i in 0..rlen {
                    let from = rho_cycles.elems[roff + i];
                    let to = pi_cycles.elems[poff + (i + rot) % rlen];
                    sigma[from as usize] = to;
                }
                if self.assign(
                    cells,
                    x,
                    r,
                    rho_cycles,
                    pi_cycles,
                    depth + 1,
                    used,
                    sigma,
                    counts,
                ) == Ordering::Less
                {
                    return Ordering::Less;
                }
            }
            used[q] = false;
        }
        Ordering::Greater
    }

    /// Builds the reduced image of conjugate x under (r -> row 0, sigma)
    /// and compares it with S row by row from row 2 (rows 0 and 1 agree by
    /// construction). Counts equality as a self-map.
    fn compare_image(
        &self,
        cells: &[u8],
        x: usize,
        r: usize,
        sigma: &[u8; MAX_ORDER],
        counts: &mut GroupCounts,
    ) -> Ordering {
        let n = self.n;
        let mut sigma_inv = [0u8; MAX_ORDER];
        for s in 0..n {
            sigma_inv[sigma[s] as usize] = s as u8;
        }
        let mut cols = [0u8; MAX_ORDER];
        for (j, c) in cols.iter_mut().enumerate().take(n) {
            *c = self.pos_in_row[x][r * n + sigma_inv[j] as usize];
        }
        let c0 = cols[0] as usize;
        for i in 2..n {
            let v = self.pos_in_col[x][c0 * n + sigma_inv[i] as usize] as usize;
            for j in 1..n {
                let img = sigma[self.conj[x][v * n + cols[j] as usize] as usize];
                let s = cells[i * n + j];
                match img.cmp(&s) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
        }
        counts.par += 1;
        if x == 0 {
            counts.atp += 1;
        }
        counts.conj_hits[x] = true;
        Ordering::Equal
    }

    /// Builds the full reduced image for (x, r, sigma); used by the
    /// expansion path.
    fn image_into(&self, x: usize, r: usize, sigma: &[u8], out: &mut [u8]) {
        let n = self.n;
        let mut sigma_inv = [0u8; MAX_ORDER];
        for s in 0..n {
            sigma_inv[sigma[s] as usize] = s as u8;
        }
        let mut cols = [0u8; MAX_ORDER];
        for (j, c) in cols.iter_mut().enumerate().take(n) {
            *c = self.pos_in_row[x][r * n + sigma_inv[j] as usize];
        }
        let c0 = cols[0] as usize;
        for i in 0..n {
            let v = self.pos_in_col[x][c0 * n + sigma_inv[i] as usize] as usize;
            for j in 0..n {
                out[i * n + j] = sigma[self.conj[x][v * n + cols[j] as usize] as usize];
            }
        }
    }
}

/// Plain reduction of a raw grid: relabel symbols to put row 0 in order,
/// then reorder rows to put column 0 in order.
fn reduce_cells(cells: &[u8], n: usize) -> Vec<u8> {
    let mut sym = [0u8; MAX_ORDER];
    for c in 0..n {
        sym[cells[c] as usize] = c as u8;
    }
    let mut out = vec![0u8; n * n];
    for r in 0..n {
        let new_r = sym[cells[r * n] as usize] as usize;
        for c in 0..n {
            out[new_r * n + c] = sym[cells[r * n + c] as usize];
        }
    }
    out
}

impl Screener {
    /// The least reduced member of the species of `cells` (any valid grid).
    fn minimize(&mut self, cells: &[u8]) -> Vec<u8> {
        let n = self.n;
        if n == 1 {
            return cells.to_vec();
        }
        self.load(cells);
        let mut best = reduce_cells(cells, n);
        let mut rho = [0u8; MAX_ORDER];
        let mut block = [0u8; MAX_ORDER];
        let mut image = vec![0u8; n * n];
        for x in 0..6 {
            for r in 0..n {
                for u in 0..n {
                    if u == r {
                        continue;
                    }
                    for c in 0..n {
                        rho[self.conj[x][r * n + c] as usize] = self.conj[x][u * n + c];
                    }
                    if block_vs_target(&rho[..n], &best[n..2 * n], &mut block) == Ordering::Greater
                    {
                        continue;
                    }
                    // Enumerate the sigmas whose image starts with the block
                    // row; any other sigma is beaten on row 1 already.
                    let rho_cycles = cycles_of(&rho[..n]);
                    let pi_cycles = cycles_of(&block[..n]);
                    let mut sigma = [0u8; MAX_ORDER];
                    let mut used = [false; MAX_ORDER];
                    minimize_assign(
                        self,
                        x,
                        r,
                        &rho_cycles,
                        &pi_cycles,
                        0,
                        &mut used,
                        &mut sigma,
                        &mut image,
                        &mut best,
                    );
                }
            }
        }
        best
    }
}

#[allow(clippy::too_many_arguments)]
fn minimize_assign(
    screener: &Screener,
    x: usize,
    r: usize,
    rho_cycles: &Cycles,
    pi_cycles: &Cycles,
    depth: usize,
    used: &mut [bool; MAX_ORDER],
    sigma: &mut [u8; MAX_ORDER],
    image: &mut [u8],
    best: &mut [u8],
) {
    if depth == rho_cycles.count {
        screener.image_into(x, r, &sigma[..screener.n], image);
        if image[..] < best[..] {
            best.copy_from_slice(image);
        }
        return;
    }
    let (roff, rlen) = rho_cycles.bounds[depth];
    for q in 0..pi_cycles.count {
        let (poff, plen) = pi_cycles.bounds[q];
        if used[q] || plen != rlen {
            continue;
        }
        used[q] = true;
        for rot in 0..rlen {
            for i in 0..rlen {
                let from = rho_cycles.elems[roff + i];
                let to = pi_cycles.elems[poff + (i + rot) % rlen];
                sigma[from as usize] = to;
            }
            minimize_assign(
                screener,
                x,
                r,
                rho_cycles,
                pi_cycles,
                depth + 1,
                used,
                sigma,
                image,
                best,
            );
        }
        used[q] = false;
    }
}

/// Least reduced member of the species of any valid square, with the
/// symmetry counts of that species.
pub fn min_reduced_member(l: &LatinSquare) -> (LatinSquare, GroupCounts) {
    let n = l.order();
    let mut screener = Screener::new(n);
    let best = screener.minimize(l.cells());
    let rep = LatinSquare::validate(n, best).expect("species member is latin");
    match screener.screen(rep.cells()) {
        Screen::Minimal(counts) => (rep, counts),
        Screen::NotMinimal => unreachable!("minimize returns the least member"),
    }
}

struct Cycles {
    elems: [u8; MAX_ORDER],
    bounds: [(usize, usize); MAX_ORDER / 2],
    count: usize,
}

fn cycles_of(perm: &[u8]) -> Cycles {
    let n = perm.len();
    let mut cycles = Cycles {
        elems: [0; MAX_ORDER],
        bounds: [(0, 0); MAX_ORDER / 2],
        count: 0,
    };
    let mut seen = [false; MAX_ORDER];
    let mut off = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let begin = off;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycles.elems[off] = i as u8;
            off += 1;
            i = perm[i] as usize;
        }
        cycles.bounds[cycles.count] = (begin, off - begin);
        cycles.count += 1;
    }
    cycles
}

/// Compares the block form of rho's cycle type against the target row,
/// writing the block form into the scratch buffer.
fn block_vs_target(rho: &[u8], target: &[u8], scratch: &mut [u8; MAX_ORDER]) -> std::cmp::Ordering {
    let n = rho.len();
    let mut lengths = [0u8; MAX_ORDER / 2];
    let mut count = 0;
    let mut seen = [false; MAX_ORDER];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u8;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = rho[i] as usize;
        }
        lengths[count] = len;
        count += 1;
    }
    lengths[..count].sort_unstable();
    let mut base = 0u8;
    for &len in &lengths[..count] {
        for i in 0..len {
            scratch[(base + i) as usize] = base + (i + 1) % len;
        }
        base += len;
    }
    scratch[..n].cmp(target)
}

// ---------------------------------------------------------------------------
// Canonical members of k-MOLS list species.
//
// A reduced image of a list arises from an ordered column triple (a, b, c)
// of its orthogonal array — rows, columns, and the first square's symbols —
// a row r of that aspect sent to row 0, a free symbol permutation sigma on
// the aspect, and an ordering of the remaining columns as the other squares
// (their symbol relabelings are forced by first-row normalization). Row 1
// of the first square is again a conjugate of a row permutation of the
// aspect, so the block-form bound prunes (triple, r) candidates, and the
// free ordering of the remaining columns is resolved by sorting their
// forced images.

/// Canonical data of a k-MOLS list species.
#[derive(Debug, Clone)]
pub struct ListCanon {
    /// Least reduced member of the species.
    pub rep: MolsList,
    /// Autoparatopism group order.
    pub par: u64,
    /// Column permutations of the array realized by autoparatopisms of the
    /// representative.
    pub col_action: Vec<Vec<u8>>,
}

/// Least reduced member of the species of `m`.
pub fn list_min_rep(m: &MolsList) -> MolsList {
    list_search(m, false).rep
}

/// Full canonical data; `rep` must already be the least member (as returned
/// by [`list_min_rep`]), so that the self-map records form the whole column
/// action rather than a coset of it.
pub fn list_canon(rep: &MolsList) -> ListCanon {
    let mut out = list_search(rep, true);
    debug_assert_eq!(&out.rep, rep, "input to list_canon must be canonical");
    out.col_action.sort_unstable();
    out.col_action.dedup();
    out
}

fn list_search(m: &MolsList, collect: bool) -> ListCanon {
    let n = m.order();
    let k = m.len();
    let w = k + 2;
    let oa = m.to_oa();
    let mut grids = ListGrids::new(n, w);

    // A valid starting member: identity arrangement, row 0, identity sigma.
    grids.load_triple(&oa, 0, 1, 2);
    let identity: Vec<u8> = (0..n as u8).collect();
    let mut best = vec![0u8; k * n * n];
    let mut chunk_scratch = vec![vec![0u8; n * n]; k];
    grids.build_image(0, &identity, &mut chunk_scratch);
    let mut sorted: Vec<usize> = (1..k).collect();
    sorted.sort_by(|&i, &j| chunk_scratch[i].cmp(&chunk_scratch[j]));
    best[..n * n].copy_from_slice(&chunk_scratch[0]);
    for (slot, &i) in sorted.iter().enumerate() {
        best[(slot + 1) * n * n..(slot + 2) * n * n].copy_from_slice(&chunk_scratch[i]);
    }

    let mut par = 0u64;
    let mut hits: Vec<Vec<u8>> = Vec::new();
    let mut rho = [0u8; MAX_ORDER];
    let mut block = [0u8; MAX_ORDER];
    for a in 0..w {
        for b in 0..w {
            if b == a {
                continue;
            }
            for c in 0..w {
                if c == a || c == b {
                    continue;
                }
                grids.load_triple(&oa, a, b, c);
                for r in 0..n {
                    for u in 0..n {
                        if u == r || n == 1 {
                            continue;
                        }
                        for col in 0..n {
                            rho[grids.aspect[r * n + col] as usize] = grids.aspect[u * n + col];
                        }
                        if block_vs_target(&rho[..n], &best[n..2 * n], &mut block)
                            == Ordering::Greater
                        {
                            continue;
                        }
                        let rho_cycles = cycles_of(&rho[..n]);
                        let pi_cycles = cycles_of(&block[..n]);
                        for_each_conjugator(&rho_cycles, &pi_cycles, &mut |sigma| {
                            grids.consider(
                                r,
                                sigma,
                                &mut chunk_scratch,
                                &mut best,
                                &mut par,
                                collect.then_some(&mut hits),
                                (a, b, c),
                            );
                        });
                    }
                }
                if n == 1 {
                    // Degenerate order: every map is a self-map.
                    grids.consider(
                        0,
                        &identity,
                        &mut chunk_scratch,
                        &mut best,
                        &mut par,
                        collect.then_some(&mut hits),
                        (a, b, c),
                    );
                }
            }
        }
    }

    let squares = (0..k)
        .map(|i| {
            LatinSquare::validate(n, best[i * n * n..(i + 1) * n * n].to_vec())
                .expect("canonical member squares are latin")
        })
        .collect();
    ListCanon {
        rep: MolsList::new(squares).expect("canonical member is a MOLS list"),
        par,
        col_action: hits,
    }
}

struct ListGrids {
    n: usize,
    w: usize,
    /// Aspect of the current ordered triple (a, b, c).
    aspect: Vec<u8>,
    pos_in_row: Vec<u8>,
    pos_in_col: Vec<u8>,
    /// Remaining original columns, ascending, and their grids indexed by
    /// the (a, b) coordinates.
    rest: Vec<usize>,
    companions: Vec<Vec<u8>>,
}

impl ListGrids {
    fn new(n: usize, w: usize) -> ListGrids {
        ListGrids {
            n,
            w,
            aspect: vec![0; n * n],
            pos_in_row: vec![0; n * n],
            pos_in_col: vec![0; n * n],
            rest: Vec::new(),
            companions: vec![vec![0; n * n]; w - 3],
        }
    }

    fn load_triple(&mut self, oa: &crate::mols::OrthogonalArray, a: usize, b: usize, c: usize) {
        let n = self.n;
        self.rest = (0..self.w)
            .filter(|&d| d != a && d != b && d != c)
            .collect();
        for row in 0..n * n {
            let t = oa.get(row, a) as usize;
            let u = oa.get(row, b) as usize;
            self.aspect[t * n + u] = oa.get(row, c);
            for (m, &d) in self.rest.iter().enumerate() {
                self.companions[m][t * n + u] = oa.get(row, d);
            }
        }
        for t in 0..n {
            for u in 0..n {
                let s = self.aspect[t * n + u] as usize;
                self.pos_in_row[t * n + s] = u as u8;
                self.pos_in_col[u * n + s] = t as u8;
            }
        }
    }

    /// Builds the (first square, companion squares) images for (r, sigma)
    /// into the scratch chunks, compares the candidate — companions in
    /// sorted order — against the best, and updates best plus self-map
    /// records.
    #[allow(clippy::too_many_arguments)]
    fn consider(
        &self,
        r: usize,
        sigma: &[u8],
        chunks: &mut [Vec<u8>],
        best: &mut [u8],
        par: &mut u64,
        mut hits: Option<&mut Vec<Vec<u8>>>,
        triple: (usize, usize, usize),
    ) {
        let n = self.n;
        let k = chunks.len();
        self.build_image(r, sigma, chunks);
        // First square first; an early loss avoids companion sorting.
        let first_cmp = chunks[0][..].cmp(&best[..n * n]);
        if first_cmp == Ordering::Greater {
            return;
        }
        let mut order: Vec<usize> = (1..k).collect();
        order.sort_by(|&i, &j| chunks[i].cmp(&chunks[j]));
        let mut cmp = first_cmp;
        for (slot, &i) in order.iter().enumerate() {
            if cmp != Ordering::Equal {
                break;
            }
            cmp = chunks[i][..].cmp(&best[(slot + 1) * n * n..(slot + 2) * n * n]);
        }
        match cmp {
            Ordering::Greater => {}
            Ordering::Less => {
                best[..n * n].copy_from_slice(&chunks[0]);
                for (slot, &i) in order.iter().enumerate() {
                    best[(slot + 1) * n * n..(slot + 2) * n * n].copy_from_slice(&chunks[i]);
                }
                *par = suffix_multiplicity(&order, chunks);
                if let Some(hits) = hits.as_deref_mut() {
                    hits.clear();
                    self.record_hits(triple, &order, chunks, hits);
                }
            }
            Ordering::Equal => {
                *par += suffix_multiplicity(&order, chunks);
                if let Some(hits) = hits {
                    self.record_hits(triple, &order, chunks, hits);
                }
            }
        }
    }

    /// Image of the first square and every companion under (r, sigma):
    /// alpha relabels rows, beta columns, and each companion's symbols are
    /// forced by its first row.
    fn build_image(&self, r: usize, sigma: &[u8], chunks: &mut [Vec<u8>]) {
        let n = self.n;
        let mut sigma_inv = [0u8; MAX_ORDER];
        for s in 0..n {
            sigma_inv[sigma[s] as usize] = s as u8;
        }
        let c0 = self.pos_in_row[r * n + sigma_inv[0] as usize] as usize;
        let mut alpha = [0u8; MAX_ORDER];
        let mut beta = [0u8; MAX_ORDER];
        for t in 0..n {
            alpha[t] = sigma[self.aspect[t * n + c0] as usize];
            beta[t] = sigma[self.aspect[r * n + t] as usize];
        }
        for t in 0..n {
            let at = alpha[t] as usize;
            for u in 0..n {
                chunks[0][at * n + beta[u] as usize] = sigma[self.aspect[t * n + u] as usize];
            }
        }
        let mut sym = [0u8; MAX_ORDER];
        for (m, grid) in self.companions.iter().enumerate() {
            for u in 0..n {
                sym[grid[r * n + u] as usize] = beta[u];
            }
            for t in 0..n {
                let at = alpha[t] as usize;
                for u in 0..n {
                    chunks[m + 1][at * n + beta[u] as usize] = sym[grid[t * n + u] as usize];
                }
            }
        }
    }

    /// Records the arrangements (column permutations) of every map whose
    /// image equals the best: the triple, then each assignment of remaining
    /// columns consistent with the sorted companion order.
    fn record_hits(
        &self,
        triple: (usize, usize, usize),
        order: &[usize],
        chunks: &[Vec<u8>],
        hits: &mut Vec<Vec<u8>>,
    ) {
        let mut arrangement = vec![triple.0 as u8, triple.1 as u8, triple.2 as u8];
        // Group equal companion images; every within-group order is a
        // distinct self-map.
        let groups: Vec<Vec<u8>> = {
            let mut gs: Vec<Vec<u8>> = Vec::new();
            let mut i = 0;
            while i < order.len() {
                let mut g = vec![self.rest[order[i] - 1] as u8];
                let mut j = i + 1;
                while j < order.len() && chunks[order[j]] == chunks[order[i]] {
                    g.push(self.rest[order[j] - 1] as u8);
                    j += 1;
                }
                gs.push(g);
                i = j;
            }
            gs
        };
        fn emit(
            groups: &[Vec<u8>],
            depth: usize,
            arrangement: &mut Vec<u8>,
            hits: &mut Vec<Vec<u8>>,
        ) {
            if depth == groups.len() {
                hits.push(arrangement.clone());
                return;
            }
            // All orderings within the group.
            let g = &groups[depth];
            let mut idx: Vec<usize> = (0..g.len()).collect();
            loop {
                for &i in &idx {
                    arrangement.push(g[i]);
                }
                emit(groups, depth + 1, arrangement, hits);
                arrangement.truncate(arrangement.len() - g.len());
                // next permutation of idx
                let mut i = g.len().saturating_sub(1);
                while i > 0 && idx[i - 1] >= idx[i] {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                let mut j = g.len() - 1;
                while idx[j] <= idx[i - 1] {
                    j -= 1;
                }
                idx.swap(i - 1, j);
                idx[i..].reverse();
            }
        }
        emit(&groups, 0, &mut arrangement, hits);
    }
}

/// Number of suffix orderings matching the sorted companion sequence:
/// the product of factorials of equal-image group sizes.
fn suffix_multiplicity(order: &[usize], chunks: &[Vec<u8>]) -> u64 {
    let mut mult = 1u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && chunks[order[j]] == chunks[order[i]] {
            j += 1;
        }
        mult *= (1..=(j - i) as u64).product::<u64>();
        i = j;
    }
    mult
}

fn for_each_conjugator(rho_cycles: &Cycles, pi_cycles: &Cycles, f: &mut impl FnMut(&[u8])) {
    let mut sigma = [0u8; MAX_ORDER];
    let mut used = [false; MAX_ORDER];
    let total: usize = (0..rho_cycles.count).map(|i| rho_cycles.bounds[i].1).sum();
    fn rec(
        rho_cycles: &Cycles,
        pi_cycles: &Cycles,
        depth: usize,
        used: &mut [bool; MAX_ORDER],
        sigma: &mut [u8; MAX_ORDER],
        total: usize,
        f: &mut impl FnMut(&[u8]),
    ) {
        if depth == rho_cycles.count {
            f(&sigma[..total]);
            return;
        }
        let (roff, rlen) = rho_cycles.bounds[depth];
        for q in 0..pi_cycles.count {
            let (poff, plen) = pi_cycles.bounds[q];
            if used[q] || plen != rlen {
                continue;
            }
            used[q] = true;
            for rot in 0..rlen {
                for i in 0..rlen {
                    let from = rho_cycles.elems[roff + i];
                    let to = pi_cycles.elems[poff + (i + rot) % rlen];
                    sigma[from as usize] = to;
                }
                rec(rho_cycles, pi_cycles, depth + 1, used, sigma, total, f);
            }
            used[q] = false;
        }
    }
    rec(rho_cycles, pi_cycles, 0, &mut used, &mut sigma, total, f);
}

/// One species representative (least reduced member) per species, with its
/// symmetry counts, found by screening the candidate stream.
pub fn find_species_reps(n: usize, threads: usize) -> Vec<(LatinSquare, GroupCounts)> {
    let patterns = block_row1_patterns(n);
    if n <= 2 {
        // Too small for prefix splitting; screen everything directly.
        let mut screener = Screener::new(n);
        let mut reps = Vec::new();
        for_each_reduced_square(n, |cells| {
            if let Screen::Minimal(counts) = screener.screen(cells) {
                reps.push((
                    LatinSquare::validate(n, cells.to_vec()).expect("enumerated"),
                    counts,
                ));
            }
        });
        return reps;
    }
    let prefixes = scan_prefixes(n, &patterns);
    let threads = threads.max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(LatinSquare, GroupCounts)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| {
                let mut screener = Screener::new(n);
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                    if i >= prefixes.len() {
                        break;
                    }
                    for_each_reduced_with_prefix(n, &prefixes[i], |cells| {
                        if let Screen::Minimal(counts) = screener.screen(cells) {
                            local.push((
                                LatinSquare::validate(n, cells.to_vec()).expect("enumerated"),
                                counts,
                            ));
                        }
                    });
                }
                results
                    .lock()
                    .expect("no panics hold the lock")
                    .extend(local);
            });
        }
    });
    let mut reps = results.into_inner().expect("workers joined");
    reps.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    reps
}

/// Validation path: species representatives by expanding each newly seen
/// species over all of its reduced members. Memory grows with the number of
/// reduced squares, so this is for n <= 7. Returns the representatives with
/// par orders, plus the total number of reduced squares seen.
pub fn species_reps_by_expansion(n: usize) -> (Vec<(LatinSquare, GroupCounts)>, u64) {
    assert!(n <= 7, "expansion stores every reduced square");
    let mut perms: Vec<Vec<u8>> = Vec::new();
    crate::perm::for_each_perm(n, |p| perms.push(p.images().to_vec()));
    let mut known: HashSet<u128> = HashSet::new();
    let mut reps = Vec::new();
    let mut total = 0u64;
    let mut screener = Screener::new(n);
    let mut image = vec![0u8; n * n];
    for_each_reduced_square(n, |cells| {
        total += 1;
        if known.contains(&pack(cells, n)) {
            return;
        }
        screener.load(cells);
        let mut counts = GroupCounts::default();
        for x in 0..6 {
            for r in 0..n {
                for sigma in &perms {
                    screener.image_into(x, r, sigma, &mut image);
                    if image == cells {
                        counts.par += 1;
                        if x == 0 {
                            counts.atp += 1;
                        }
                        counts.conj_hits[x] = true;
                    }
                    known.insert(pack(&image, n));
                }
            }
        }
        reps.push((
            LatinSquare::validate(n, cells.to_vec()).expect("enumerated"),
            counts,
        ));
    });
    (reps, total)
}

/// Packs the free cells of a reduced square (rows and columns 1..n) into 3
/// bits each; fits in 128 bits for n <= 7.
fn pack(cells: &[u8], n: usize) -> u128 {
    debug_assert!(n <= 7);
    let mut key = 0u128;
    for r in 1..n {
        for c in 1..n {
            key = key << 3 | cells[r * n + c] as u128;
        }
    }
    key
}
