//! Exact counting identities for MOLS, over arbitrary-precision integers
//! and rationals. Division is always checked: a non-integral result means an
//! upstream count is corrupt, and surfaces as an error instead of a rounding.

use crate::latin::LatinSquare;
use crate::mols::MolsList;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("derived count {what} is not an integer")]
    NonIntegral { what: &'static str },
    #[error("parameters out of range: need 1 <= k < n, got k = {k}, n = {n}")]
    BadParameters { n: usize, k: usize },
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// The four linked counts of a class of k-MOLS of order n closed under
/// isotopisms: reduced/arbitrary sets and lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuad {
    pub n: usize,
    pub k: usize,
    pub reduced_sets: BigInt,
    pub reduced_lists: BigInt,
    pub all_lists: BigInt,
    pub all_sets: BigInt,
}

impl CountQuad {
    /// The switching identity:
    /// (k-1)! n!^k (n-1)! RS = n!^k (n-1)! RL = AL = k! AS.
    pub fn holds(&self) -> bool {
        let scale = factorial(self.n).pow(self.k as u32) * factorial(self.n - 1);
        factorial(self.k - 1) * &scale * &self.reduced_sets == &scale * &self.reduced_lists
            && &scale * &self.reduced_lists == self.all_lists
            && self.all_lists == factorial(self.k) * &self.all_sets
    }
}

/// Which of the four counts is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KnownCount {
    ReducedSets(BigInt),
    ReducedLists(BigInt),
    AllLists(BigInt),
    AllSets(BigInt),
}

fn exact_div(num: BigInt, den: &BigInt, what: &'static str) -> Result<BigInt, CountingError> {
    let (q, r) = num_integer_div_rem(num, den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(CountingError::NonIntegral { what })
    }
}

fn num_integer_div_rem(num: BigInt, den: &BigInt) -> (BigInt, BigInt) {
    let q = &num / den;
    let r = &num - &q * den;
    (q, r)
}

/// Derives all four counts of [`CountQuad`] from any one of them.
pub fn switch_counts(n: usize, k: usize, known: KnownCount) -> Result<CountQuad, CountingError> {
    if k < 1 || k >= n {
        return Err(CountingError::BadParameters { n, k });
    }
    let scale = factorial(n).pow(k as u32) * factorial(n - 1);
    let all_lists = match known {
        KnownCount::ReducedSets(rs) => factorial(k - 1) * &scale * rs,
        KnownCount::ReducedLists(rl) => &scale * rl,
        KnownCount::AllLists(al) => al,
        KnownCount::AllSets(asets) => factorial(k) * asets,
    };
    let quad = CountQuad {
        n,
        k,
        reduced_sets: exact_div(
            all_lists.clone(),
            &(factorial(k - 1) * &scale),
            "reduced sets",
        )?,
        reduced_lists: exact_div(all_lists.clone(), &scale, "reduced lists")?,
        all_sets: exact_div(all_lists.clone(), &factorial(k), "all sets")?,
        all_lists,
    };
    debug_assert!(quad.holds());
    Ok(quad)
}

/// Number of reduced sets of k-MOLS paratopic to some member of a family of
/// pairwise non-paratopic sets, from their autoparatopism group orders:
/// n! n (k+2)(k+1)k * sum(1 / |par|).
pub fn reduced_sets_from_reps(
    n: usize,
    k: usize,
    par_orders: &[BigInt],
) -> Result<BigInt, CountingError> {
    if k < 1 || k >= n {
        return Err(CountingError::BadParameters { n, k });
    }
    let factor = factorial(n) * BigInt::from(n * (k + 2) * (k + 1) * k);
    let sum: BigRational = par_orders
        .iter()
        .map(|p| {
            assert!(p.is_positive(), "group orders are positive");
            BigRational::new(BigInt::one(), p.clone())
        })
        .sum();
    let total = BigRational::from_integer(factor) * sum;
    if total.is_integer() {
        Ok(total.to_integer())
    } else {
        Err(CountingError::NonIntegral {
            what: "reduced set count",
        })
    }
}

/// How many pairs (A, B) of reduced MOLS with A a species representative are
/// paratopic to a given pair: sum of the aspect par orders over |par(P)|.
pub fn aspect_multiplicity(pair: &MolsList) -> BigRational {
    assert_eq!(pair.len(), 2, "aspect multiplicity is defined for pairs");
    let rep = crate::species::list_min_rep(pair);
    let par_pair = BigInt::from(crate::species::list_canon(&rep).par);
    let aspect_sum: BigInt = pair
        .aspects()
        .iter()
        .map(|square| BigInt::from(crate::species::min_reduced_member(square).1.par))
        .sum();
    BigRational::new(aspect_sum, par_pair)
}

/// Number of latin squares in the species of `l`: 6 n!^3 / |par|.
pub fn species_size(l: &LatinSquare) -> BigInt {
    let par = BigInt::from(crate::species::min_reduced_member(l).1.par);
    species_size_from_par(l.order(), &par).expect("a group order divides the orbit numerator")
}

pub fn species_size_from_par(n: usize, par: &BigInt) -> Result<BigInt, CountingError> {
    exact_div(BigInt::from(6) * factorial(n).pow(3), par, "species size")
}

/// Number of reduced squares in a species: 6 n! n / |par|.
pub fn reduced_in_species_from_par(n: usize, par: &BigInt) -> Result<BigInt, CountingError> {
    exact_div(
        BigInt::from(6) * factorial(n) * BigInt::from(n),
        par,
        "reduced squares in species",
    )
}

/// Mate statistics for a uniformly random latin square of order n, from one
/// (theta, |par|) pair per species: the probability of having a mate and the
/// expected number of mates. Species are weighted by their size.
pub fn random_ls_stats(
    n: usize,
    reps: &[(u64, BigInt)],
) -> Result<(BigRational, BigRational), CountingError> {
    let mut total = BigInt::zero();
    let mut mated = BigInt::zero();
    let mut mates = BigInt::zero();
    for (theta, par) in reps {
        let size = species_size_from_par(n, par)?;
        total += &size;
        if *theta > 0 {
            mated += &size;
        }
        mates += BigInt::from(*theta) * &size;
    }
    assert!(
        total.is_positive(),
        "species list covers at least one square"
    );
    Ok((
        BigRational::new(mated, total.clone()),
        BigRational::new(mates, total),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigInt {
        s.parse().expect("test literal")
    }

    #[test]
    fn switching_small_identities() {
        // k = 1: reduced sets equal reduced lists, all lists equal all sets.
        let q = switch_counts(4, 1, KnownCount::ReducedSets(BigInt::from(4))).unwrap();
        assert_eq!(q.reduced_lists, BigInt::from(4));
        assert_eq!(q.all_lists, q.all_sets);
        // 4 reduced squares of order 4 -> 576 squares in total.
        assert_eq!(q.all_lists, BigInt::from(576));
    }

    #[test]
    fn switching_is_consistent_from_any_side() {
        let from_rl = switch_counts(7, 2, KnownCount::ReducedLists(big("342480"))).unwrap();
        assert_eq!(from_rl.all_lists, big("6263668776960000"));
        let from_al = switch_counts(7, 2, KnownCount::AllLists(from_rl.all_lists.clone())).unwrap();
        assert_eq!(from_rl, from_al);
        assert!(from_rl.holds());
    }

    #[test]
    fn switching_rejects_non_integral() {
        let err = switch_counts(4, 2, KnownCount::AllLists(BigInt::from(7))).unwrap_err();
        assert!(matches!(err, CountingError::NonIntegral { .. }));
        assert!(matches!(
            switch_counts(4, 4, KnownCount::AllLists(BigInt::one())),
            Err(CountingError::BadParameters { .. })
        ));
    }

    #[test]
    fn reduced_sets_formula_examples() {
        // One species with |par| = 14400/18 = 800 gives the 18 reduced
        // pairs of order 5.
        assert_eq!(
            reduced_sets_from_reps(5, 2, &[BigInt::from(800)]).unwrap(),
            BigInt::from(18)
        );
        // Non-integral totals are corruption, not rounding.
        assert!(matches!(
            reduced_sets_from_reps(5, 2, &[BigInt::from(7)]),
            Err(CountingError::NonIntegral { .. })
        ));
    }

    #[test]
    fn species_sizes_of_order_four() {
        assert_eq!(species_size(&LatinSquare::cyclic(4)), BigInt::from(432));
        assert_eq!(
            species_size(&LatinSquare::elementary_abelian(4)),
            BigInt::from(144)
        );
        let trivial = LatinSquare::validate(1, vec![0]).unwrap();
        assert_eq!(species_size(&trivial), BigInt::one());
    }

    #[test]
    fn stats_for_tiny_orders() {
        // Order 3: one species, theta = 1.
        let (p, e) = random_ls_stats(3, &[(1, BigInt::from(108))]).unwrap();
        assert_eq!(p, BigRational::one());
        assert_eq!(e, BigRational::one());
        // Order 4: Z4 (theta 0, par 192) and EA4 (theta 2, par 576).
        let reps = vec![(0u64, BigInt::from(192)), (2u64, BigInt::from(576))];
        let (p, e) = random_ls_stats(4, &reps).unwrap();
        assert_eq!(p, BigRational::new(BigInt::one(), BigInt::from(4)));
        assert_eq!(e, BigRational::new(BigInt::one(), BigInt::from(2)));
    }

    #[test]
    fn aspect_multiplicity_is_exhaustive_at_order_5() {
        // All pairs (A, B) with A the reduced Z5 representative: theta = 3
        // of them, all paratopic; the lemma must count exactly those.
        let z5 = LatinSquare::cyclic(5);
        let pairs = MolsList::single(z5.clone()).extend().unwrap();
        assert_eq!(pairs.len(), 3);
        let mult = aspect_multiplicity(&pairs[0]);
        assert_eq!(mult, BigRational::from_integer(BigInt::from(3)));
        // mult * |par(P)| is the integral sum of the aspect par orders.
        let par = crate::canon::par_order(&pairs[0]);
        assert!((mult * BigRational::from_integer(par)).is_integer());
    }
}
