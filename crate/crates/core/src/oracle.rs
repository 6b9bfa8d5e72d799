//! Exact-cover encodings used to cross-check the bit-parallel search.
//!
//! These builders feed the independent `xcover` solver and deliberately use
//! their own item layout; nothing here touches the packed profile words in
//! `plex`.

use crate::mols::MolsList;
use crate::plex::Plex;
use xcover::Instance;

/// Items: n row slots, then n column slots, then n symbol slots per square.
/// One subset per cell; solutions are exactly the common transversals.
pub fn transversal_instance(m: &MolsList) -> Instance {
    let n = m.order();
    let k = m.len();
    let items = n * 2 + n * k;
    let mut subsets = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut subset = Vec::with_capacity(2 + k);
            subset.push(r as u32);
            subset.push((n + c) as u32);
            for (i, sq) in m.squares().iter().enumerate() {
                subset.push((2 * n + i * n + sq.get(r, c) as usize) as u32);
            }
            subsets.push(subset);
        }
    }
    Instance::new(items, subsets).expect("cell subsets reference valid items")
}

/// Items: the n^2 cells; subsets: the given transversals. Solutions are the
/// 1-partitions.
pub fn partition_instance(transversals: &[Plex], n: usize) -> Instance {
    let subsets = transversals
        .iter()
        .map(|t| t.cell_indices().map(|c| c as u32).collect())
        .collect();
    Instance::new(n * n, subsets).expect("transversal cells are in range")
}

/// Transversal cell sets found by the oracle, as packed cell bitmaps
/// comparable with the plex catalogue.
pub fn oracle_transversal_sets(m: &MolsList) -> Vec<u128> {
    let n = m.order();
    let inst = transversal_instance(m);
    let mut sets: Vec<u128> = inst
        .solutions()
        .iter()
        .map(|sol| {
            let mut cells = 0u128;
            for &subset in sol {
                // subset index s encodes cell (s / n, s % n) by construction
                cells |= 1u128 << subset;
            }
            debug_assert_eq!(cells.count_ones() as usize, n);
            cells
        })
        .collect();
    sets.sort_unstable();
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::LatinSquare;
    use crate::plex::{count_partitions, enumerate_plexes, Profile};

    #[test]
    fn z3_has_three_solutions() {
        let m = MolsList::single(LatinSquare::cyclic(3));
        assert_eq!(transversal_instance(&m).count_solutions(), 3);
    }

    #[test]
    fn cyclic7_and_steiner_counts() {
        let z7 = MolsList::single(LatinSquare::cyclic(7));
        assert_eq!(transversal_instance(&z7).count_solutions(), 133);
        let steiner = MolsList::single(LatinSquare::steiner_7());
        let cat = enumerate_plexes(&Profile::for_square(&LatinSquare::steiner_7()), 1).unwrap();
        let inst = partition_instance(cat.plexes(), 7);
        assert_eq!(inst.count_solutions(), 8);
        assert_eq!(transversal_instance(&steiner).count_solutions(), 63);
    }

    #[test]
    fn partition_counts_agree_on_small_squares() {
        for l in [
            LatinSquare::cyclic(3),
            LatinSquare::cyclic(5),
            LatinSquare::elementary_abelian(4),
            LatinSquare::cyclic(7),
            LatinSquare::steiner_7(),
        ] {
            let n = l.order();
            let cat = enumerate_plexes(&Profile::for_square(&l), 1).unwrap();
            let inst = partition_instance(cat.plexes(), n);
            assert_eq!(inst.count_solutions(), count_partitions(&cat, 1).unwrap());
        }
    }

    #[test]
    fn cyclic7_partition_count_from_both_routes() {
        // Fixes theta(Z7) = 635 by two independent algorithms.
        let l = LatinSquare::cyclic(7);
        let cat = enumerate_plexes(&Profile::for_square(&l), 1).unwrap();
        let inst = partition_instance(cat.plexes(), 7);
        assert_eq!(inst.count_solutions(), 635);
        assert_eq!(count_partitions(&cat, 1).unwrap(), 635);
    }

    #[test]
    fn oracle_and_plex_find_identical_transversal_sets() {
        let mut rng = crate::random::SplitMix64::new(71);
        for n in [5, 6, 7] {
            for _ in 0..5 {
                let l = crate::random::random_latin_square(n, &mut rng);
                let m = MolsList::single(l.clone());
                let cat = enumerate_plexes(&Profile::for_square(&l), 1).unwrap();
                let mut mine: Vec<u128> = cat.plexes().iter().map(|p| p.cells()).collect();
                mine.sort_unstable();
                assert_eq!(mine, oracle_transversal_sets(&m));
            }
        }
    }
}
