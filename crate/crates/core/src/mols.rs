//! Lists of mutually orthogonal latin squares, the orthogonal-array
//! correspondence, aspects, common transversals and extension.

use crate::latin::{count_distinct_pairs, LatinError, LatinSquare};
use crate::perm::Perm;
use crate::plex::{self, PlexError, Profile};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolsError {
    #[error(transparent)]
    Latin(#[from] LatinError),
    #[error("squares {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("list must contain at least one square")]
    Empty,
    #[error("invalid coordinate columns ({0}, {1})")]
    InvalidColumns(usize, usize),
    #[error("column pair ({0}, {1}) does not realize every ordered symbol pair")]
    NotOrthogonalArray(usize, usize),
    #[error("orthogonal array shape is inconsistent")]
    BadShape,
    #[error(transparent)]
    Plex(#[from] PlexError),
}

/// An ordered list of pairwise orthogonal latin squares of one order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MolsList {
    order: usize,
    squares: Vec<LatinSquare>,
}

impl MolsList {
    pub fn new(squares: Vec<LatinSquare>) -> Result<MolsList, MolsError> {
        let first = squares.first().ok_or(MolsError::Empty)?;
        let order = first.order();
        for sq in &squares {
            if sq.order() != order {
                return Err(LatinError::SizeMismatch(order, sq.order()).into());
            }
        }
        for i in 0..squares.len() {
            for j in i + 1..squares.len() {
                if count_distinct_pairs(&squares[i], &squares[j])? != (order * order) as u64 {
                    return Err(MolsError::NotOrthogonal(i, j));
                }
            }
        }
        Ok(MolsList { order, squares })
    }

    pub fn single(square: LatinSquare) -> MolsList {
        MolsList {
            order: square.order(),
            squares: vec![square],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of squares, the k in k-MOLS.
    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    /// The n^2 x (k+2) orthogonal array with one row (r, c, L_1[r,c], ...,
    /// L_k[r,c]) per cell, in row-major cell order.
    pub fn to_oa(&self) -> OrthogonalArray {
        let n = self.order;
        let w = self.squares.len() + 2;
        let mut rows = Vec::with_capacity(n * n * w);
        for r in 0..n {
            for c in 0..n {
                rows.push(r as u8);
                rows.push(c as u8);
                for sq in &self.squares {
                    rows.push(sq.get(r, c));
                }
            }
        }
        OrthogonalArray { n, width: w, rows }
    }

    /// Reads a list of k = width - 2 squares back out of an orthogonal
    /// array, using `row_col` and `col_col` as the coordinate columns and
    /// the remaining columns, in ascending order, as the squares.
    pub fn from_oa(
        oa: &OrthogonalArray,
        row_col: usize,
        col_col: usize,
    ) -> Result<MolsList, MolsError> {
        let n = oa.n;
        let w = oa.width;
        if row_col == col_col || row_col >= w || col_col >= w {
            return Err(MolsError::InvalidColumns(row_col, col_col));
        }
        let sym_cols: Vec<usize> = (0..w).filter(|&c| c != row_col && c != col_col).collect();
        let mut grids = vec![vec![0u8; n * n]; sym_cols.len()];
        let mut seen = vec![false; n * n];
        for row in 0..n * n {
            let r = oa.get(row, row_col) as usize;
            let c = oa.get(row, col_col) as usize;
            if seen[r * n + c] {
                return Err(MolsError::NotOrthogonalArray(row_col, col_col));
            }
            seen[r * n + c] = true;
            for (m, &sc) in sym_cols.iter().enumerate() {
                grids[m][r * n + c] = oa.get(row, sc);
            }
        }
        let squares = grids
            .into_iter()
            .map(|g| LatinSquare::validate(n, g))
            .collect::<Result<Vec<_>, _>>()?;
        MolsList::new(squares)
    }

    /// All C(k+2, 3) aspects: one latin square per unordered choice of three
    /// orthogonal-array columns, the lowest giving rows, the middle columns
    /// and the highest symbols.
    pub fn aspects(&self) -> Vec<LatinSquare> {
        let oa = self.to_oa();
        let w = oa.width;
        let n = self.order;
        let mut out = Vec::new();
        for a in 0..w {
            for b in a + 1..w {
                for c in b + 1..w {
                    let mut cells = vec![0u8; n * n];
                    for row in 0..n * n {
                        let r = oa.get(row, a) as usize;
                        let cc = oa.get(row, b) as usize;
                        cells[r * n + cc] = oa.get(row, c);
                    }
                    out.push(LatinSquare::from_valid(n, cells));
                }
            }
        }
        out
    }

    pub fn profile(&self) -> Result<Profile, PlexError> {
        Profile::build(self)
    }

    /// All common transversals, in the catalogue's lexicographic order.
    pub fn common_transversals(&self) -> Result<Vec<CommonTransversal>, MolsError> {
        let cat = plex::enumerate_plexes(&self.profile()?, 1)?;
        Ok(cat
            .plexes()
            .iter()
            .map(|p| CommonTransversal {
                oa_rows: p.cell_indices().map(|x| x as u32).collect(),
            })
            .collect())
    }

    /// Maximum cardinality of a pairwise-disjoint family of common
    /// transversals.
    pub fn max_disjoint_common_transversals(&self) -> Result<usize, MolsError> {
        let cat = plex::enumerate_plexes(&self.profile()?, 1)?;
        Ok(plex::max_disjoint(&cat))
    }

    /// Every extension by one more square, one per 1-partition of the joint
    /// profile. Part t of a partition is the one using cell (0, t), so each
    /// appended square has first row 0..n.
    pub fn extend(&self) -> Result<Vec<MolsList>, MolsError> {
        let mut out = Vec::new();
        self.for_each_extension(|ext| {
            out.push(ext);
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// Streaming variant of [`MolsList::extend`].
    pub fn for_each_extension<F>(&self, mut visit: F) -> Result<(), MolsError>
    where
        F: FnMut(MolsList) -> ControlFlow<()>,
    {
        let n = self.order;
        let cat = plex::enumerate_plexes(&self.profile()?, 1)?;
        plex::for_each_partition(&cat, |chosen| {
            let mut cells = vec![0u8; n * n];
            for (t, &idx) in chosen.iter().enumerate() {
                for cell in cat.plexes()[idx as usize].cell_indices() {
                    cells[cell] = t as u8;
                }
            }
            let square = LatinSquare::from_valid(n, cells);
            let mut squares = self.squares.clone();
            squares.push(square);
            let ext = MolsList::new(squares).expect("partition parts give an orthogonal mate");
            visit(ext)
        })?;
        Ok(())
    }

    /// Number of extensions without materializing them; for a single square
    /// this is theta.
    pub fn extension_count(&self) -> Result<u64, MolsError> {
        let cat = plex::enumerate_plexes(&self.profile()?, 1)?;
        Ok(plex::count_partitions(&cat, 1)?)
    }

    /// True when no (k+1)-extension exists.
    pub fn is_maximal(&self) -> Result<bool, MolsError> {
        Ok(self.extension_count()? == 0)
    }
}

/// An n^2 x width orthogonal array of strength 2 and index 1: every column
/// pair realizes each ordered symbol pair exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrthogonalArray {
    n: usize,
    width: usize,
    rows: Vec<u8>,
}

impl OrthogonalArray {
    pub fn new(n: usize, width: usize, rows: Vec<u8>) -> Result<OrthogonalArray, MolsError> {
        if width < 3 || rows.len() != n * n * width || !(1..=crate::latin::MAX_ORDER).contains(&n) {
            return Err(MolsError::BadShape);
        }
        let oa = OrthogonalArray { n, width, rows };
        for row in 0..n * n {
            for col in 0..width {
                if oa.get(row, col) as usize >= n {
                    return Err(MolsError::BadShape);
                }
            }
        }
        for a in 0..width {
            for b in a + 1..width {
                let mut seen = 0u128;
                for row in 0..n * n {
                    let code = oa.get(row, a) as usize * n + oa.get(row, b) as usize;
                    if seen >> code & 1 == 1 {
                        return Err(MolsError::NotOrthogonalArray(a, b));
                    }
                    seen |= 1 << code;
                }
            }
        }
        Ok(oa)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.rows[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.rows[row * self.width..(row + 1) * self.width]
    }

    /// Rebuilds the array taking new column j from old column `cols[j]` with
    /// symbols mapped through `perms[j]`. Row order is preserved.
    pub fn relabel(&self, cols: &[usize], perms: &[Perm]) -> OrthogonalArray {
        assert_eq!(cols.len(), self.width);
        assert_eq!(perms.len(), self.width);
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in 0..self.n * self.n {
            for j in 0..self.width {
                rows.push(perms[j].apply(self.get(row, cols[j]) as usize) as u8);
            }
        }
        OrthogonalArray {
            n: self.n,
            width: self.width,
            rows,
        }
    }

    /// Reorders columns only.
    pub fn permute_columns(&self, cols: &[usize]) -> OrthogonalArray {
        let identity: Vec<Perm> = (0..self.width).map(|_| Perm::identity(self.n)).collect();
        self.relabel(cols, &identity)
    }
}

/// A common transversal, stored as the n chosen orthogonal-array row
/// indices (for arrays built by [`MolsList::to_oa`], row r*n + c is cell
/// (r, c)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonTransversal {
    oa_rows: Vec<u32>,
}

impl CommonTransversal {
    pub fn oa_rows(&self) -> &[u32] {
        &self.oa_rows
    }

    /// Checks that each column of the induced subarray is a permutation.
    pub fn is_valid_for(&self, oa: &OrthogonalArray) -> bool {
        if self.oa_rows.len() != oa.n {
            return false;
        }
        for col in 0..oa.width {
            let mut seen = 0u16;
            for &row in &self.oa_rows {
                let s = oa.get(row as usize, col);
                if seen >> s & 1 == 1 {
                    return false;
                }
                seen |= 1 << s;
            }
        }
        true
    }
}
