//! Latin squares: validation, normalization, symmetry actions and
//! per-square substructure counts.

use crate::perm::Perm;
use thiserror::Error;

/// Largest supported order. Bounds every bitstring width in the crate.
pub const MAX_ORDER: usize = 10;

/// An order-n latin square over symbols `0..n`, stored row-major.
///
/// The row/column invariants hold for every constructed value; all mutation
/// goes through [`LatinSquare::validate`] or the symmetry actions, which
/// preserve them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("order {0} outside supported range 1..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("grid is not {n}x{n}")]
    ShapeMismatch { n: usize },
    #[error("symbol {sym} out of range at row {row}, column {col}")]
    BadSymbol { row: usize, col: usize, sym: usize },
    #[error("symbol {sym} repeated in row {row}")]
    DuplicateInRow { row: usize, sym: u8 },
    #[error("symbol {sym} repeated in column {col}")]
    DuplicateInColumn { col: usize, sym: u8 },
    #[error("orders differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("subsquare order {m} out of range for order {n}")]
    SubsquareOrderOutOfRange { m: usize, n: usize },
}

/// An isotopism: a row permutation, a column permutation, and a symbol
/// permutation, each a bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isotopism {
    pub rows: Perm,
    pub cols: Perm,
    pub syms: Perm,
}

impl Isotopism {
    pub fn identity(n: usize) -> Isotopism {
        Isotopism {
            rows: Perm::identity(n),
            cols: Perm::identity(n),
            syms: Perm::identity(n),
        }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

impl LatinSquare {
    /// Checks both latin invariants on a row-major grid and wraps it.
    pub fn validate(n: usize, cells: Vec<u8>) -> Result<LatinSquare, LatinError> {
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(LatinError::OrderOutOfRange(n));
        }
        if cells.len() != n * n {
            return Err(LatinError::ShapeMismatch { n });
        }
        for r in 0..n {
            for c in 0..n {
                let sym = cells[r * n + c] as usize;
                if sym >= n {
                    return Err(LatinError::BadSymbol {
                        row: r,
                        col: c,
                        sym,
                    });
                }
            }
        }
        for r in 0..n {
            let mut seen = 0u16;
            for c in 0..n {
                let sym = cells[r * n + c];
                if seen & (1 << sym) != 0 {
                    return Err(LatinError::DuplicateInRow { row: r, sym });
                }
                seen |= 1 << sym;
            }
        }
        for c in 0..n {
            let mut seen = 0u16;
            for r in 0..n {
                let sym = cells[r * n + c];
                if seen & (1 << sym) != 0 {
                    return Err(LatinError::DuplicateInColumn { col: c, sym });
                }
                seen |= 1 << sym;
            }
        }
        Ok(LatinSquare { n, cells })
    }

    /// Wraps a grid known to be latin. Checked in debug builds.
    pub(crate) fn from_valid(n: usize, cells: Vec<u8>) -> LatinSquare {
        debug_assert!(LatinSquare::validate(n, cells.clone()).is_ok());
        LatinSquare { n, cells }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<LatinSquare, LatinError> {
        let n = rows.len();
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(LatinError::OrderOutOfRange(n));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatinError::ShapeMismatch { n });
        }
        LatinSquare::validate(n, rows.concat())
    }

    /// The Cayley table of the cyclic group: `L[r][c] = (r + c) mod n`.
    pub fn cyclic(n: usize) -> LatinSquare {
        assert!((1..=MAX_ORDER).contains(&n));
        let cells = (0..n)
            .flat_map(|r| (0..n).map(move |c| ((r + c) % n) as u8))
            .collect();
        LatinSquare { n, cells }
    }

    /// The elementary abelian group of order 4, 8 or 9.
    pub fn elementary_abelian(n: usize) -> LatinSquare {
        let cells: Vec<u8> = match n {
            4 | 8 => (0..n)
                .flat_map(|r| (0..n).map(move |c| (r ^ c) as u8))
                .collect(),
            9 => (0..9)
                .flat_map(|r| {
                    (0..9).map(move |c| {
                        let (a, b) = (r / 3, r % 3);
                        let (x, y) = (c / 3, c % 3);
                        (((a + x) % 3) * 3 + (b + y) % 3) as u8
                    })
                })
                .collect(),
            _ => panic!("no elementary abelian group table for order {n}"),
        };
        LatinSquare { n, cells }
    }

    /// The Steiner quasigroup of order 7: `x * x = x`, and for distinct
    /// points `x * y` is the third point of the Fano line through them.
    pub fn steiner_7() -> LatinSquare {
        const LINES: [[u8; 3]; 7] = [
            [0, 1, 3],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 6],
            [4, 5, 0],
            [5, 6, 1],
            [6, 0, 2],
        ];
        let mut cells = vec![0u8; 49];
        for x in 0..7u8 {
            cells[(x * 7 + x) as usize] = x;
        }
        for line in LINES {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        let k = 3 - i - j;
                        cells[(line[i] as usize) * 7 + line[j] as usize] = line[k];
                    }
                }
            }
        }
        LatinSquare::from_valid(7, cells)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    /// True when row 0 and column 0 are both in natural order.
    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|i| self.get(0, i) == i as u8 && self.get(i, 0) == i as u8)
    }

    /// Normalizes to a reduced square: symbols are relabelled to put row 0 in
    /// order, then rows are reordered to put column 0 in order. Returns the
    /// reduced square together with the isotopism that maps `self` to it.
    pub fn reduce(&self) -> (LatinSquare, Isotopism) {
        let n = self.n;
        let syms = Perm::from_images(self.row(0).to_vec())
            .expect("latin row is a permutation")
            .inverse();
        let rows = Perm::from_images(
            (0..n)
                .map(|r| syms.images()[self.get(r, 0) as usize])
                .collect(),
        )
        .expect("relabelled column is a permutation");
        let iso = Isotopism {
            rows,
            cols: Perm::identity(n),
            syms,
        };
        (self.apply_isotopism(&iso).expect("orders match"), iso)
    }

    /// Applies an isotopism: `result[rows(r)][cols(c)] = syms(L[r][c])`.
    pub fn apply_isotopism(&self, t: &Isotopism) -> Result<LatinSquare, LatinError> {
        let n = self.n;
        if t.order() != n {
            return Err(LatinError::SizeMismatch(n, t.order()));
        }
        let mut cells = vec![0u8; n * n];
        for r in 0..n {
            for c in 0..n {
                cells[t.rows.apply(r) * n + t.cols.apply(c)] =
                    t.syms.apply(self.get(r, c) as usize) as u8;
            }
        }
        Ok(LatinSquare::from_valid(n, cells))
    }

    /// The six conjugates obtained by permuting the (row, column, symbol)
    /// roles, in a fixed order starting with the square itself.
    pub fn conjugates(&self) -> [LatinSquare; 6] {
        let n = self.n;
        let mut out: [LatinSquare; 6] = std::array::from_fn(|_| LatinSquare {
            n,
            cells: vec![0u8; n * n],
        });
        for r in 0..n {
            for c in 0..n {
                let s = self.get(r, c) as usize;
                out[0].cells[r * n + c] = s as u8; // (r, c, s)
                out[1].cells[c * n + r] = s as u8; // (c, r, s) transpose
                out[2].cells[r * n + s] = c as u8; // (r, s, c)
                out[3].cells[s * n + c] = r as u8; // (s, c, r)
                out[4].cells[c * n + s] = r as u8; // (c, s, r)
                out[5].cells[s * n + r] = c as u8; // (s, r, c)
            }
        }
        debug_assert!(out
            .iter()
            .all(|sq| LatinSquare::validate(n, sq.cells.clone()).is_ok()));
        out
    }

    /// Number of 2x2 latin subsquares.
    pub fn count_intercalates(&self) -> u64 {
        let n = self.n;
        let mut count = 0;
        for r1 in 0..n {
            for r2 in r1 + 1..n {
                for c1 in 0..n {
                    for c2 in c1 + 1..n {
                        if self.get(r1, c1) == self.get(r2, c2)
                            && self.get(r1, c2) == self.get(r2, c1)
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    /// Number of m-row by m-column selections inducing an order-m latin
    /// square on m symbols. Proper subsquares only: `2 <= m <= n/2`.
    pub fn count_subsquares(&self, m: usize) -> Result<u64, LatinError> {
        let n = self.n;
        if m < 2 || 2 * m > n {
            return Err(LatinError::SubsquareOrderOutOfRange { m, n });
        }
        let mut count = 0;
        let mut rows = Vec::new();
        self.subsquares_rec(m, 0, &mut rows, &mut count);
        Ok(count)
    }

    fn subsquares_rec(&self, m: usize, from: usize, rows: &mut Vec<usize>, count: &mut u64) {
        if rows.len() == m {
            *count += self.count_column_sets(rows, m);
            return;
        }
        let need = m - rows.len();
        for r in from..=self.n - need {
            rows.push(r);
            self.subsquares_rec(m, r + 1, rows, count);
            rows.pop();
        }
    }

    /// Counts column m-subsets whose intersection with `rows` is latin.
    fn count_column_sets(&self, rows: &[usize], m: usize) -> u64 {
        // For the chosen rows, a valid column set is closed under "columns
        // sharing a symbol set of size m". Enumerate column subsets with the
        // running union of symbols capped at m.
        let n = self.n;
        let mut count = 0;
        let mut stack: Vec<(usize, Vec<usize>, u16)> = vec![(0, Vec::new(), 0)];
        while let Some((from, cols, syms)) = stack.pop() {
            if cols.len() == m {
                if self.is_latin_on(rows, &cols) {
                    count += 1;
                }
                continue;
            }
            let need = m - cols.len();
            for c in from..=n - need {
                let mut s = syms;
                for &r in rows {
                    s |= 1 << self.get(r, c);
                }
                if (s.count_ones() as usize) <= m {
                    let mut cols2 = cols.clone();
                    cols2.push(c);
                    stack.push((c + 1, cols2, s));
                }
            }
        }
        count
    }

    fn is_latin_on(&self, rows: &[usize], cols: &[usize]) -> bool {
        let m = rows.len();
        let mut symbols = 0u16;
        for &r in rows {
            let mut row_syms = 0u16;
            for &c in cols {
                row_syms |= 1 << self.get(r, c);
            }
            if row_syms.count_ones() as usize != m {
                return false;
            }
            if symbols == 0 {
                symbols = row_syms;
            } else if symbols != row_syms {
                return false;
            }
        }
        for &c in cols {
            let mut col_syms = 0u16;
            for &r in rows {
                col_syms |= 1 << self.get(r, c);
            }
            if col_syms != symbols {
                return false;
            }
        }
        true
    }
}

/// Cardinality of `{(A[r][c], B[r][c])}` over all cells; equals n^2 exactly
/// when the squares are orthogonal.
pub fn count_distinct_pairs(a: &LatinSquare, b: &LatinSquare) -> Result<u64, LatinError> {
    let n = a.order();
    if b.order() != n {
        return Err(LatinError::SizeMismatch(n, b.order()));
    }
    let mut seen = 0u128;
    let mut count = 0u64;
    for i in 0..n * n {
        let code = (a.cells[i] as usize) * n + b.cells[i] as usize;
        if seen >> code & 1 == 0 {
            seen |= 1 << code;
            count += 1;
        }
    }
    Ok(count)
}

pub fn are_orthogonal(a: &LatinSquare, b: &LatinSquare) -> bool {
    count_distinct_pairs(a, b).map(|d| d == (a.order() * a.order()) as u64) == Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(rows: &[&[u8]]) -> LatinSquare {
        LatinSquare::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validate_accepts_cyclic() {
        let l = sq(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert_eq!(l, LatinSquare::cyclic(3));
    }

    #[test]
    fn validate_rejects_column_duplicate() {
        let err = LatinSquare::from_rows(&[vec![0, 1], vec![0, 1]]).unwrap_err();
        assert_eq!(err, LatinError::DuplicateInColumn { col: 0, sym: 0 });
    }

    #[test]
    fn validate_rejects_bad_symbol() {
        let err = LatinSquare::validate(2, vec![0, 1, 1, 9]).unwrap_err();
        assert!(matches!(
            err,
            LatinError::BadSymbol {
                row: 1,
                col: 1,
                sym: 9
            }
        ));
    }

    #[test]
    fn reduce_identity_on_reduced() {
        let l = LatinSquare::cyclic(5);
        assert!(l.is_reduced());
        let (r, iso) = l.reduce();
        assert_eq!(r, l);
        assert!(iso.rows.is_identity() && iso.cols.is_identity() && iso.syms.is_identity());
    }

    #[test]
    fn reduce_sorts_symbols_then_rows() {
        let l = sq(&[&[1, 2, 0], &[2, 0, 1], &[0, 1, 2]]);
        let (r, _) = l.reduce();
        assert_eq!(r, LatinSquare::cyclic(3));
    }

    #[test]
    fn reduce_is_idempotent() {
        let mut rng = crate::random::SplitMix64::new(7);
        for _ in 0..20 {
            let l = crate::random::random_latin_square(5, &mut rng);
            let (r1, iso) = l.reduce();
            assert_eq!(l.apply_isotopism(&iso).unwrap(), r1);
            let (r2, _) = r1.reduce();
            assert_eq!(r1, r2);
            assert!(r1.is_reduced());
        }
    }

    #[test]
    fn isotopism_preserves_latin_property() {
        let mut rng = crate::random::SplitMix64::new(9);
        for _ in 0..50 {
            let l = crate::random::random_latin_square(6, &mut rng);
            let t = crate::random::random_isotopism(6, &mut rng);
            let image = l.apply_isotopism(&t).unwrap();
            assert!(LatinSquare::validate(6, image.cells().to_vec()).is_ok());
        }
    }

    #[test]
    fn isotopism_composes() {
        let mut rng = crate::random::SplitMix64::new(13);
        let l = crate::random::random_latin_square(7, &mut rng);
        let s = crate::random::random_isotopism(7, &mut rng);
        let t = crate::random::random_isotopism(7, &mut rng);
        let st = Isotopism {
            rows: s.rows.then(&t.rows),
            cols: s.cols.then(&t.cols),
            syms: s.syms.then(&t.syms),
        };
        assert_eq!(
            l.apply_isotopism(&s).unwrap().apply_isotopism(&t).unwrap(),
            l.apply_isotopism(&st).unwrap()
        );
    }

    #[test]
    fn intercalate_counts() {
        assert_eq!(LatinSquare::cyclic(3).count_intercalates(), 0);
        assert_eq!(LatinSquare::cyclic(2).count_intercalates(), 1);
        // Z4: row pairs and column pairs must both differ by 2, giving 2*2.
        assert_eq!(LatinSquare::cyclic(4).count_intercalates(), 4);
        // EA4: one intercalate per (row pair, col pair) with equal xor
        // difference d: 3 values of d, 2 row pairs and 2 col pairs each.
        assert_eq!(LatinSquare::elementary_abelian(4).count_intercalates(), 12);
    }

    #[test]
    fn subsquares_match_intercalates_at_m2() {
        let mut rng = crate::random::SplitMix64::new(21);
        for n in [4, 5, 6, 7] {
            for _ in 0..5 {
                let l = crate::random::random_latin_square(n, &mut rng);
                assert_eq!(l.count_subsquares(2).unwrap(), l.count_intercalates());
            }
        }
    }

    #[test]
    fn subsquare_counts_for_groups() {
        // Subsquares of an abelian group table are coset pairs (a+H, b+H).
        // EA(9): 4 subgroups of order 3, 3x3 coset pairs each.
        let ea9 = LatinSquare::elementary_abelian(9);
        assert_eq!(ea9.count_subsquares(3).unwrap(), 36);
        assert!(matches!(
            ea9.count_subsquares(5),
            Err(LatinError::SubsquareOrderOutOfRange { .. })
        ));
        // EA(8): 7 subgroups of order 4, 2x2 coset pairs each.
        assert_eq!(
            LatinSquare::elementary_abelian(8)
                .count_subsquares(4)
                .unwrap(),
            28
        );
    }

    #[test]
    fn distinct_pairs_diagonal() {
        let l = LatinSquare::cyclic(6);
        assert_eq!(count_distinct_pairs(&l, &l).unwrap(), 6);
    }

    #[test]
    fn distinct_pairs_symmetric() {
        let mut rng = crate::random::SplitMix64::new(3);
        for _ in 0..10 {
            let a = crate::random::random_latin_square(6, &mut rng);
            let b = crate::random::random_latin_square(6, &mut rng);
            assert_eq!(
                count_distinct_pairs(&a, &b).unwrap(),
                count_distinct_pairs(&b, &a).unwrap()
            );
        }
    }

    #[test]
    fn conjugates_are_latin_and_involutive() {
        let mut rng = crate::random::SplitMix64::new(5);
        let l = crate::random::random_latin_square(7, &mut rng);
        let conj = l.conjugates();
        assert_eq!(conj[0], l);
        assert_eq!(conj[1].conjugates()[1], l);
        assert_eq!(conj[2].conjugates()[2], l);
    }

    #[test]
    fn steiner_square_is_idempotent_commutative() {
        let s = LatinSquare::steiner_7();
        for x in 0..7 {
            assert_eq!(s.get(x, x), x as u8);
            for y in 0..7 {
                assert_eq!(s.get(x, y), s.get(y, x));
            }
        }
    }

    #[test]
    fn intercalates_invariant_under_isotopism() {
        let mut rng = crate::random::SplitMix64::new(11);
        for _ in 0..10 {
            let l = crate::random::random_latin_square(6, &mut rng);
            let t = crate::random::random_isotopism(6, &mut rng);
            let img = l.apply_isotopism(&t).unwrap();
            assert_eq!(l.count_intercalates(), img.count_intercalates());
        }
    }
}
