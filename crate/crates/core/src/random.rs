//! Seeded pseudo-random generation of latin squares and symmetries, used by
//! the randomized test suites and the oracle benchmark. Everything here is
//! deterministic given the seed.

use crate::latin::{Isotopism, LatinSquare};
use crate::mols::MolsList;
use crate::perm::Perm;

/// SplitMix64 generator. Small, fast, and good enough for test shuffling.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.below(i + 1);
            slice.swap(i, j);
        }
    }
}

pub fn random_perm(n: usize, rng: &mut SplitMix64) -> Perm {
    let mut images: Vec<u8> = (0..n as u8).collect();
    rng.shuffle(&mut images);
    Perm::from_images(images).expect("shuffle keeps bijectivity")
}

pub fn random_isotopism(n: usize, rng: &mut SplitMix64) -> Isotopism {
    Isotopism {
        rows: random_perm(n, rng),
        cols: random_perm(n, rng),
        syms: random_perm(n, rng),
    }
}

/// A latin square drawn by backtracking with randomized symbol preference.
/// Not uniform over all squares, but varied enough to exercise search code.
pub fn random_latin_square(n: usize, rng: &mut SplitMix64) -> LatinSquare {
    let mut order: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            let mut syms: Vec<u8> = (0..n as u8).collect();
            rng.shuffle(&mut syms);
            syms
        })
        .collect();
    loop {
        let mut cells = vec![0u8; n * n];
        if fill_from(n, 0, &mut cells, &order) {
            return LatinSquare::validate(n, cells).expect("search output is latin");
        }
        // Dead ends cannot happen with row-by-row completion of latin
        // rectangles, but reshuffle and retry rather than assume that.
        for row in &mut order {
            rng.shuffle(row);
        }
    }
}

fn fill_from(n: usize, row: usize, cells: &mut [u8], order: &[Vec<u8>]) -> bool {
    if row == n {
        return true;
    }
    let mut col_used = vec![0u16; n];
    for r in 0..row {
        for c in 0..n {
            col_used[c] |= 1 << cells[r * n + c];
        }
    }
    fill_row(n, row, 0, &mut 0u16, &mut col_used, cells, order)
        && fill_from(n, row + 1, cells, order)
}

fn fill_row(
    n: usize,
    row: usize,
    col: usize,
    row_used: &mut u16,
    col_used: &mut [u16],
    cells: &mut [u8],
    order: &[Vec<u8>],
) -> bool {
    if col == n {
        return true;
    }
    for &sym in &order[row] {
        let bit = 1u16 << sym;
        if *row_used & bit != 0 || col_used[col] & bit != 0 {
            continue;
        }
        *row_used |= bit;
        col_used[col] |= bit;
        cells[row * n + col] = sym;
        if fill_row(n, row, col + 1, row_used, col_used, cells, order) {
            return true;
        }
        *row_used &= !bit;
        col_used[col] &= !bit;
    }
    false
}

/// Applies a uniformly chosen paratopism: a random permutation of the
/// orthogonal array columns combined with random symbol permutations within
/// each column. The result is read back with columns (0, 1) as coordinates.
pub fn random_paratopism_image(m: &MolsList, rng: &mut SplitMix64) -> MolsList {
    let oa = m.to_oa();
    let w = oa.width();
    let mut cols: Vec<usize> = (0..w).collect();
    rng.shuffle(&mut cols);
    let perms: Vec<Perm> = (0..w).map(|_| random_perm(m.order(), rng)).collect();
    let shuffled = oa.relabel(&cols, &perms);
    MolsList::from_oa(&shuffled, 0, 1).expect("paratopism image of a valid OA")
}

/// Applies a random isotopism (no column permutation) to every square.
pub fn random_isotopism_image(m: &MolsList, rng: &mut SplitMix64) -> MolsList {
    let oa = m.to_oa();
    let w = oa.width();
    let cols: Vec<usize> = (0..w).collect();
    let perms: Vec<Perm> = (0..w).map(|_| random_perm(m.order(), rng)).collect();
    let shuffled = oa.relabel(&cols, &perms);
    MolsList::from_oa(&shuffled, 0, 1).expect("isotopism image of a valid OA")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_squares_are_latin_and_vary() {
        let mut rng = SplitMix64::new(42);
        let a = random_latin_square(7, &mut rng);
        let b = random_latin_square(7, &mut rng);
        assert_ne!(a, b);
    }

    #[test]
    fn deterministic_given_seed() {
        let mut r1 = SplitMix64::new(5);
        let mut r2 = SplitMix64::new(5);
        assert_eq!(
            random_latin_square(6, &mut r1),
            random_latin_square(6, &mut r2)
        );
    }
}
