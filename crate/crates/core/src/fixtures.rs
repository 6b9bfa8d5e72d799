//! Notable squares shipped with the crate: four order-9 squares with
//! distinctive mate counts, and the order-10 triple that comes closest to a
//! set of three MOLS.

use crate::io::parse_square;
use crate::latin::LatinSquare;

/// Order 9, rigid (trivial autoparatopism group); the square with the most
/// mates among those with trivial autotopism group: 8226 mates, 371
/// transversals, 6 subsquares of order 3.
pub const RIGID_8226: &str = "\
0 1 2 3 4 5 6 7 8
1 2 0 4 5 3 7 8 6
2 0 1 5 3 4 8 6 7
5 8 3 2 7 6 0 1 4
6 4 7 8 1 0 5 3 2
8 7 6 1 0 2 3 4 5
4 3 5 6 8 7 2 0 1
7 6 8 0 2 1 4 5 3
3 5 4 7 6 8 1 2 0
";

/// Order 9, 4 mates, 242 transversals, 3 subsquares of order 3 through the
/// top-left cell, autoparatopism group of order 4. Its four mates form a set
/// of MOLS with it.
pub const THETA4: &str = "\
0 1 2 3 4 5 6 7 8
1 2 0 7 5 4 8 3 6
2 0 1 6 8 7 3 4 5
3 8 6 4 0 1 2 5 7
4 5 7 0 3 8 1 6 2
5 4 8 1 7 6 0 2 3
6 7 3 2 1 0 5 8 4
7 6 5 8 2 3 4 0 1
8 3 4 5 6 2 7 1 0
";

/// Order 9, 141208 mates, 819 transversals, 18 subsquares of order 3 and
/// none of order 2. As a loop it has the antiautomorphic inverse property.
pub const BETA: &str = "\
0 1 2 3 4 5 6 7 8
1 2 0 4 5 3 7 8 6
2 0 1 5 3 4 8 6 7
3 5 4 6 7 8 0 2 1
4 3 5 7 8 6 1 0 2
5 4 3 8 6 7 2 1 0
6 8 7 0 2 1 3 4 5
7 6 8 1 0 2 4 5 3
8 7 6 2 1 0 5 3 4
";

/// Order 9, 755 transversals, 121330 mates, autoparatopism group of order
/// 2; sits in more species of maximal MOLS pairs than any other square.
pub const BUSY: &str = "\
0 1 2 3 4 5 6 7 8
1 2 3 4 5 6 7 8 0
2 0 1 5 3 7 8 6 4
3 4 8 6 7 2 0 1 5
4 8 0 7 2 3 1 5 6
5 6 4 8 0 1 2 3 7
6 7 5 0 1 8 3 4 2
7 5 6 1 8 0 4 2 3
8 3 7 2 6 4 5 0 1
";

/// Order 10: orthogonal to both [`ORDER10_B`] and [`ORDER10_C`].
pub const ORDER10_A: &str = "\
0 8 9 7 5 6 4 2 3 1
9 1 4 6 2 7 3 8 0 5
7 4 2 5 1 3 8 6 9 0
8 6 5 3 9 2 1 0 4 7
6 2 1 8 4 0 9 5 7 3
4 9 3 2 7 5 0 1 6 8
5 3 7 1 0 8 6 9 2 4
3 5 0 9 8 4 2 7 1 6
1 7 6 0 3 9 5 4 8 2
2 0 8 4 6 1 7 3 5 9
";

pub const ORDER10_B: &str = "\
0 7 8 9 1 2 3 4 5 6
9 0 6 1 8 3 2 5 4 7
7 2 0 4 3 9 1 8 6 5
8 5 3 0 2 1 7 6 9 4
6 9 5 3 0 7 4 2 1 8
4 1 7 6 5 0 8 9 3 2
5 4 2 8 9 6 0 3 7 1
3 6 1 7 4 8 5 0 2 9
1 8 4 2 6 5 9 7 0 3
2 3 9 5 7 4 6 1 8 0
";

/// Order 10: overlaying with [`ORDER10_B`] realizes 91 of the 100 ordered
/// pairs, the duplicates confined to its symbols 7, 8 and 9.
pub const ORDER10_C: &str = "\
0 7 8 9 1 2 3 4 5 6
6 4 2 8 9 5 1 3 7 0
4 9 5 3 2 7 6 0 1 8
5 1 7 6 4 3 8 9 0 2
3 2 9 0 7 1 5 6 8 4
1 0 3 7 6 8 2 5 4 9
2 8 0 1 3 4 9 7 6 5
9 5 4 2 8 6 0 1 3 7
7 3 6 5 0 9 4 8 2 1
8 6 1 4 5 0 7 2 9 3
";

pub fn rigid_8226() -> LatinSquare {
    parse_square(RIGID_8226).expect("embedded square is valid")
}

pub fn theta4() -> LatinSquare {
    parse_square(THETA4).expect("embedded square is valid")
}

pub fn beta() -> LatinSquare {
    parse_square(BETA).expect("embedded square is valid")
}

pub fn busy() -> LatinSquare {
    parse_square(BUSY).expect("embedded square is valid")
}

pub fn order10_a() -> LatinSquare {
    parse_square(ORDER10_A).expect("embedded square is valid")
}

pub fn order10_b() -> LatinSquare {
    parse_square(ORDER10_B).expect("embedded square is valid")
}

pub fn order10_c() -> LatinSquare {
    parse_square(ORDER10_C).expect("embedded square is valid")
}

/// Checks that a permutation of symbols, applied simultaneously to rows,
/// columns and symbols, maps the square to itself.
pub fn has_automorphism(l: &LatinSquare, images: &[u8]) -> bool {
    let n = l.order();
    if images.len() != n {
        return false;
    }
    (0..n).all(|r| {
        (0..n)
            .all(|c| l.get(images[r] as usize, images[c] as usize) == images[l.get(r, c) as usize])
    })
}

/// The permutation (0)(123)(456)(789) shared by the three order-10 squares.
pub fn order10_automorphism() -> [u8; 10] {
    [0, 2, 3, 1, 5, 6, 4, 8, 9, 7]
}
