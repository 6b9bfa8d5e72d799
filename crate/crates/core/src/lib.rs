//! Enumeration, classification and exact counting of mutually orthogonal
//! latin squares (MOLS) of small order.
//!
//! The main pieces:
//!
//! * [`latin`] — latin squares, isotopisms, substructure counts;
//! * [`mols`] — MOLS lists, orthogonal arrays, aspects, common transversals
//!   and extension by orthogonal mates;
//! * [`plex`] — bit-parallel enumeration of p-plexes and p-partitions,
//!   including theta (the number of 1-partitions);
//! * [`canon`] — canonical certificates and symmetry group orders for the
//!   species / isotopism / trisotopism equivalences, via a vertex-colored
//!   graph encoding of the orthogonal array;
//! * [`counting`] — exact counting identities over big integers and
//!   rationals;
//! * [`census`] — species catalogues and the full classification pipeline
//!   for one order;
//! * [`oracle`] — independent exact-cover encodings used as a correctness
//!   oracle for the plex search.

pub mod canon;
pub mod census;
pub mod counting;
pub mod fixtures;
pub mod io;
pub mod latin;
pub mod mols;
pub mod oracle;
pub mod perm;
pub mod plex;
pub mod random;
pub mod species;

pub use latin::{LatinSquare, MAX_ORDER};
pub use mols::{MolsList, OrthogonalArray};
