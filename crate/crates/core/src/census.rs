//! One-order census pipelines: species catalogues of latin squares, MOLS
//! censuses by iterated extension, and the classification counts.
//!
//! Equivalence-class counts within one species come from the column action
//! of its autoparatopism group. With Q the projection of par(M) onto the
//! k+2 orthogonal-array columns, two column arrangements give isotopic
//! lists exactly when they lie in one left Q-coset; trisotopism adds a
//! right swap of the two coordinate columns, and set semantics add right
//! permutations of the square columns. Class counts are orbit counts of
//! this action on all (k+2)! arrangements.

use crate::canon::{self, Certificate};
use crate::counting::{self, CountingError};
use crate::latin::LatinSquare;
use crate::mols::{MolsError, MolsList};
use crate::plex::{self, PlexError, Profile};
use crate::species;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("order {0} outside the supported census range")]
    UnsupportedOrder(usize),
    #[error(transparent)]
    Counting(#[from] CountingError),
    #[error(transparent)]
    Plex(#[from] PlexError),
    #[error(transparent)]
    Mols(#[from] MolsError),
    #[error("species catalogue is corrupt: {0}")]
    Corrupt(String),
}

/// One species of latin squares: its least reduced member and the species
/// invariants used for screening and statistics.
#[derive(Debug, Clone)]
pub struct LsSpecies {
    pub square: LatinSquare,
    pub certificate: Certificate,
    pub par: BigInt,
    pub atp: BigInt,
    pub theta: u64,
    pub transversals: u64,
    pub intercalates: u64,
    /// Column action of par on the three array columns.
    pub col_action: Vec<Vec<u8>>,
}

#[derive(Debug, Clone)]
pub struct SpeciesCatalogue {
    pub order: usize,
    pub species: Vec<LsSpecies>,
    /// Total reduced squares, derived as sum of 6 n! n / |par|.
    pub reduced_squares: BigInt,
}

impl SpeciesCatalogue {
    pub fn bachelor_count(&self) -> usize {
        self.species.iter().filter(|s| s.theta == 0).count()
    }
}

/// Runs jobs over an index range on a small thread pool, returning results
/// in index order regardless of scheduling.
pub(crate) fn run_indexed<T, F>(count: usize, threads: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.max(1).min(count.max(1));
    if threads <= 1 {
        return (0..count).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, T)>> = Mutex::new(Vec::with_capacity(count));
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                    if i >= count {
                        break;
                    }
                    local.push((i, job(i)));
                }
                results.lock().expect("worker panicked").extend(local);
            });
        }
    });
    let mut collected = results.into_inner().expect("workers joined");
    collected.sort_by_key(|&(i, _)| i);
    collected.into_iter().map(|(_, t)| t).collect()
}

/// Generates the complete species catalogue for one order by exhaustive
/// screen of reduced squares. Feasible through n = 7 in seconds and n = 8
/// in hours.
pub fn generate_species_reps(n: usize, threads: usize) -> Result<SpeciesCatalogue, CensusError> {
    if !(2..=8).contains(&n) {
        return Err(CensusError::UnsupportedOrder(n));
    }
    let reps = species::find_species_reps(n, threads);
    catalogue_from_reps(n, reps, threads)
}

/// Assembles the catalogue from an externally produced representative list
/// (used by resumable long runs); the list must cover every species of the
/// order exactly once.
pub fn catalogue_from_reps(
    n: usize,
    mut reps: Vec<(LatinSquare, species::GroupCounts)>,
    threads: usize,
) -> Result<SpeciesCatalogue, CensusError> {
    reps.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let entries = run_indexed(reps.len(), threads, |i| {
        let (square, counts) = &reps[i];
        let cat = plex::enumerate_plexes(&Profile::for_square(square), 1)
            .expect("transversal catalogues of order <= 8 are tiny");
        let transversals = cat.len() as u64;
        let theta = plex::count_partitions(&cat, 1).expect("p = 1 divides every order");
        LsSpecies {
            square: square.clone(),
            certificate: Certificate::of_square_species(square),
            par: BigInt::from(counts.par),
            atp: BigInt::from(counts.atp),
            theta,
            transversals,
            intercalates: square.count_intercalates(),
            col_action: counts.col_action(),
        }
    });
    let mut species = Vec::with_capacity(entries.len());
    let mut certs = BTreeSet::new();
    let mut reduced_squares = BigInt::zero();
    for entry in entries {
        if !certs.insert(entry.certificate.clone()) {
            return Err(CensusError::Corrupt(format!(
                "two representatives of order {n} share a certificate"
            )));
        }
        reduced_squares += counting::reduced_in_species_from_par(n, &entry.par)?;
        species.push(entry);
    }
    Ok(SpeciesCatalogue {
        order: n,
        species,
        reduced_squares,
    })
}

/// One species of k-MOLS in a census level.
#[derive(Debug, Clone)]
pub struct MolsSpecies {
    pub mols: MolsList,
    pub certificate: Certificate,
    pub par: BigInt,
    pub maximal: bool,
    pub col_action: Vec<Vec<u8>>,
}

/// Census of all species of k-MOLS for one order, by level k.
#[derive(Debug, Clone)]
pub struct MolsCensus {
    pub order: usize,
    pub by_k: BTreeMap<usize, Vec<MolsSpecies>>,
}

impl MolsCensus {
    pub fn level(&self, k: usize) -> &[MolsSpecies] {
        self.by_k.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn mols_species_entry(rep: MolsList, certificate: Certificate) -> Result<MolsSpecies, CensusError> {
    let canon_data = species::list_canon(&rep);
    let maximal = rep.is_maximal()?;
    Ok(MolsSpecies {
        mols: rep,
        certificate,
        par: BigInt::from(canon_data.par),
        maximal,
        col_action: canon_data.col_action,
    })
}

/// Builds the census of MOLS species by breadth-first extension: every
/// species of (k+1)-MOLS contains a list extending a species representative
/// of k-MOLS, so extending one representative per species and deduplicating
/// by certificate is exhaustive.
pub fn build_mols_census(
    catalogue: &SpeciesCatalogue,
    k_max: usize,
    threads: usize,
) -> Result<MolsCensus, CensusError> {
    let n = catalogue.order;
    let mut by_k = BTreeMap::new();
    // A catalogue representative is also the canonical member of its
    // one-square list species.
    let level1: Vec<MolsSpecies> = catalogue
        .species
        .iter()
        .map(|s| MolsSpecies {
            mols: MolsList::single(s.square.clone()),
            certificate: Certificate::of_list_species(&MolsList::single(s.square.clone())),
            par: s.par.clone(),
            maximal: s.theta == 0,
            col_action: s.col_action.clone(),
        })
        .collect();
    by_k.insert(1, level1);

    for k in 1..k_max.min(n.saturating_sub(1)) {
        let prev = &by_k[&k];
        // Candidate (k+1)-species: each extension is normalized to its
        // canonical member, so deduplication is scheduling-independent.
        let maps = run_indexed(prev.len(), threads, |i| {
            let mut local: BTreeMap<Certificate, MolsList> = BTreeMap::new();
            prev[i]
                .mols
                .for_each_extension(|ext| {
                    let rep = species::list_min_rep(&ext);
                    local
                        .entry(Certificate::of_list_species(&rep))
                        .or_insert(rep);
                    std::ops::ControlFlow::Continue(())
                })
                .expect("extension search on a valid list");
            local
        });
        let mut merged: BTreeMap<Certificate, MolsList> = BTreeMap::new();
        for map in maps {
            merged.extend(map);
        }
        if merged.is_empty() {
            break;
        }
        let items: Vec<(Certificate, MolsList)> = merged.into_iter().collect();
        let entries = run_indexed(items.len(), threads, |i| {
            let (cert, mols) = &items[i];
            mols_species_entry(mols.clone(), cert.clone())
        });
        let mut level: Vec<MolsSpecies> = entries.into_iter().collect::<Result<_, _>>()?;
        level.sort_by(|a, b| a.mols.cmp(&b.mols));
        by_k.insert(k + 1, level);
    }
    Ok(MolsCensus { order: n, by_k })
}

/// Counts of one census row under the four notions of equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub equality: BigInt,
    pub isotopism: u64,
    pub trisotopism: u64,
    pub paratopism: u64,
}

/// Classifies the species of one level, for lists or sets, optionally
/// restricted to maximal MOLS. The Equality column counts reduced lists or
/// sets via the group-order formula.
pub fn classify_counts(
    entries: &[MolsSpecies],
    n: usize,
    k: usize,
    lists: bool,
    maximal_only: bool,
) -> Result<CensusRow, CensusError> {
    let w = k + 2;
    let filtered: Vec<&MolsSpecies> = entries
        .iter()
        .filter(|e| !maximal_only || e.maximal)
        .collect();
    let mut isotopism = 0u64;
    let mut trisotopism = 0u64;
    for e in &filtered {
        isotopism += column_orbit_count(w, &e.col_action, false, !lists);
        trisotopism += column_orbit_count(w, &e.col_action, true, !lists);
    }
    let par_orders: Vec<BigInt> = filtered.iter().map(|e| e.par.clone()).collect();
    let reduced_sets = if par_orders.is_empty() {
        BigInt::zero()
    } else {
        counting::reduced_sets_from_reps(n, k, &par_orders)?
    };
    let equality = if lists {
        counting::factorial(k - 1) * &reduced_sets
    } else {
        reduced_sets.clone()
    };
    Ok(CensusRow {
        equality,
        isotopism,
        trisotopism,
        paratopism: filtered.len() as u64,
    })
}

/// Number of orbits on all w! column arrangements under left multiplication
/// by the column action and the requested right actions: a swap of the two
/// coordinate columns (trisotopism) and permutations of the square columns
/// (set semantics).
fn column_orbit_count(
    w: usize,
    left_gens: &[Vec<u8>],
    swap_coords: bool,
    forget_square_order: bool,
) -> u64 {
    let total: usize = (1..=w).product();
    let mut visited = vec![false; total];
    let mut right_gens: Vec<Vec<u8>> = Vec::new();
    if swap_coords {
        let mut tau: Vec<u8> = (0..w as u8).collect();
        tau.swap(0, 1);
        right_gens.push(tau);
    }
    if forget_square_order {
        for i in 2..w.saturating_sub(1) {
            let mut t: Vec<u8> = (0..w as u8).collect();
            t.swap(i, i + 1);
            right_gens.push(t);
        }
    }
    let mut orbits = 0u64;
    let mut stack = Vec::new();
    let mut sigma = vec![0u8; w];
    let mut image = vec![0u8; w];
    for start in 0..total {
        if visited[start] {
            continue;
        }
        orbits += 1;
        visited[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            unrank_perm(idx, &mut sigma);
            for g in left_gens {
                for j in 0..w {
                    image[j] = g[sigma[j] as usize];
                }
                let t = rank_perm(&image);
                if !visited[t] {
                    visited[t] = true;
                    stack.push(t);
                }
            }
            for g in &right_gens {
                for j in 0..w {
                    image[j] = sigma[g[j] as usize];
                }
                let t = rank_perm(&image);
                if !visited[t] {
                    visited[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    orbits
}

/// Lehmer-code rank of a permutation.
fn rank_perm(perm: &[u8]) -> usize {
    let w = perm.len();
    let mut rank = 0usize;
    for i in 0..w {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank = rank * (w - i) + smaller;
    }
    rank
}

fn unrank_perm(mut rank: usize, out: &mut [u8]) {
    let w = out.len();
    let mut digits = vec![0usize; w];
    for i in (0..w).rev() {
        digits[i] = rank % (w - i);
        rank /= w - i;
    }
    let mut pool: Vec<u8> = (0..w as u8).collect();
    for i in 0..w {
        out[i] = pool.remove(digits[i]);
    }
}

/// Joint histogram of (number of common transversals, maximum disjoint
/// family size) over the given species.
pub fn common_transversal_table(
    entries: &[MolsSpecies],
) -> Result<BTreeMap<(u64, u64), u64>, CensusError> {
    let mut table = BTreeMap::new();
    for e in entries {
        let cat = plex::enumerate_plexes(&e.mols.profile()?, 1)?;
        let common = cat.len() as u64;
        let disjoint = plex::max_disjoint(&cat) as u64;
        *table.entry((common, disjoint)).or_insert(0) += 1;
    }
    Ok(table)
}

/// Planarity of one set of MOLS: P when every member square's species is
/// planar (belongs to some complete set), N when none is, M otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarityType {
    Planar,
    NonPlanar,
    Mixed,
}

impl std::fmt::Display for PlanarityType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlanarityType::Planar => "P",
            PlanarityType::NonPlanar => "N",
            PlanarityType::Mixed => "M",
        })
    }
}

/// Species certificates of every square involved in a complete set (k =
/// n - 1), collected over all aspects. Requires the census to reach
/// completeness, which this crate only does for n <= 8.
pub fn planar_species_certs(census: &MolsCensus) -> Result<BTreeSet<Certificate>, CensusError> {
    if census.order > 8 {
        return Err(CensusError::UnsupportedOrder(census.order));
    }
    let mut planar = BTreeSet::new();
    for entry in census.level(census.order - 1) {
        for aspect in entry.mols.aspects() {
            planar.insert(canon::square_species_certificate(&aspect));
        }
    }
    Ok(planar)
}

pub fn planarity_type(m: &MolsList, planar: &BTreeSet<Certificate>) -> PlanarityType {
    let mut planar_count = 0;
    for square in m.squares() {
        if planar.contains(&canon::square_species_certificate(square)) {
            planar_count += 1;
        }
    }
    if planar_count == m.len() {
        PlanarityType::Planar
    } else if planar_count == 0 {
        PlanarityType::NonPlanar
    } else {
        PlanarityType::Mixed
    }
}

/// Histogram: number of distinct latin-square species among the aspects of
/// each given MOLS species.
pub fn species_involvement_table(entries: &[MolsSpecies]) -> BTreeMap<usize, u64> {
    let mut table = BTreeMap::new();
    for e in entries {
        let distinct: BTreeSet<Certificate> = e
            .mols
            .aspects()
            .iter()
            .map(canon::square_species_certificate)
            .collect();
        *table.entry(distinct.len()).or_insert(0) += 1;
    }
    table
}
