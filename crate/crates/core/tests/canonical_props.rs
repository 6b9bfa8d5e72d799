//! Properties of the equivalence machinery: certificate invariance, the
//! refinement chain between the notions, agreement between the graph
//! certificates and the canonical-member certificates, and the order-5
//! list-versus-set example.

use molscope::canon::{self, encode_graph, EquivalenceMode};
use molscope::latin::LatinSquare;
use molscope::mols::MolsList;
use molscope::random::{
    random_isotopism_image, random_latin_square, random_paratopism_image, SplitMix64,
};
use molscope::species;
use std::collections::BTreeSet;

/// The order-5 squares L_x[i][j] = x*i + j mod 5.
fn l_x(x: usize) -> LatinSquare {
    let cells = (0..5)
        .flat_map(|i| (0..5).map(move |j| ((x * i + j) % 5) as u8))
        .collect();
    LatinSquare::validate(5, cells).expect("group table")
}

#[test]
fn order5_lists_versus_sets_example() {
    // (L1, L4) is isotopic to (L4, L1); (L1, L2) is not isotopic to
    // (L2, L1); all of them lie in one species.
    let l14 = MolsList::new(vec![l_x(1), l_x(4)]).unwrap();
    let l41 = MolsList::new(vec![l_x(4), l_x(1)]).unwrap();
    let l12 = MolsList::new(vec![l_x(1), l_x(2)]).unwrap();
    let l21 = MolsList::new(vec![l_x(2), l_x(1)]).unwrap();
    let iso = |m: &MolsList| canon::mols_certificate(m, EquivalenceMode::IsotopismList);
    assert_eq!(iso(&l14), iso(&l41));
    assert_ne!(iso(&l12), iso(&l21));
    let species = |m: &MolsList| canon::mols_certificate(m, EquivalenceMode::SpeciesMols);
    let all: BTreeSet<_> = [&l14, &l41, &l12, &l21]
        .iter()
        .map(|m| species(m))
        .collect();
    assert_eq!(all.len(), 1);
    // And the same verdicts from the canonical-member route.
    assert_eq!(species::list_min_rep(&l14), species::list_min_rep(&l12));
}

#[test]
fn certificate_invariance_under_paratopisms() {
    let mut rng = SplitMix64::new(31415);
    let fixtures: Vec<MolsList> = vec![
        MolsList::single(LatinSquare::cyclic(3)),
        MolsList::single(random_latin_square(6, &mut rng)),
        MolsList::new(vec![l_x(1), l_x(2)]).unwrap(),
        MolsList::new(vec![l_x(1), l_x(2), l_x(3)]).unwrap(),
    ];
    for fixture in &fixtures {
        let reference = canon::list_species_certificate(fixture);
        for _ in 0..100 {
            let image = random_paratopism_image(fixture, &mut rng);
            assert_eq!(canon::list_species_certificate(&image), reference);
        }
        // Graph certificates agree on a smaller sample; they are the slow
        // reference implementation.
        let graph_ref = canon::mols_certificate(fixture, EquivalenceMode::SpeciesMols);
        for _ in 0..5 {
            let image = random_paratopism_image(fixture, &mut rng);
            assert_eq!(
                canon::mols_certificate(&image, EquivalenceMode::SpeciesMols),
                graph_ref
            );
        }
    }
}

#[test]
fn mode_refinement_chain() {
    // Equal isotopism-list certificates imply equal trisotopism-list
    // certificates imply equal species certificates.
    let mut rng = SplitMix64::new(2718);
    let base = MolsList::new(vec![l_x(1), l_x(3)]).unwrap();
    let mut images = vec![base.clone()];
    for _ in 0..6 {
        images.push(random_isotopism_image(&base, &mut rng));
        images.push(random_paratopism_image(&base, &mut rng));
    }
    let certs: Vec<_> = images
        .iter()
        .map(|m| {
            (
                canon::mols_certificate(m, EquivalenceMode::IsotopismList),
                canon::mols_certificate(m, EquivalenceMode::TrisotopismList),
                canon::mols_certificate(m, EquivalenceMode::SpeciesMols),
            )
        })
        .collect();
    for a in &certs {
        for b in &certs {
            if a.0 == b.0 {
                assert_eq!(a.1, b.1, "isotopic lists must be trisotopic");
            }
            if a.1 == b.1 {
                assert_eq!(a.2, b.2, "trisotopic lists must be paratopic");
            }
        }
    }
    // Isotopic images really do share the isotopism certificate.
    assert_eq!(certs[0].0, certs[1].0);
}

#[test]
fn graph_and_member_certificates_define_the_same_classes() {
    let mut rng = SplitMix64::new(999);
    let mut squares: Vec<LatinSquare> = (0..6).map(|_| random_latin_square(5, &mut rng)).collect();
    squares.push(LatinSquare::cyclic(5));
    squares.push(LatinSquare::elementary_abelian(4));
    squares.push(random_latin_square(4, &mut rng));
    for a in &squares {
        for b in &squares {
            if a.order() != b.order() {
                continue;
            }
            let graph_equal = canon::canonical_certificate(&encode_graph(
                &MolsList::single(a.clone()).to_oa(),
                EquivalenceMode::SpeciesLs,
            )) == canon::canonical_certificate(&encode_graph(
                &MolsList::single(b.clone()).to_oa(),
                EquivalenceMode::SpeciesLs,
            ));
            let member_equal =
                canon::square_species_certificate(a) == canon::square_species_certificate(b);
            assert_eq!(graph_equal, member_equal);
        }
    }
}

#[test]
fn aut_orders_agree_between_routes() {
    let mut rng = SplitMix64::new(777);
    for n in [4, 5, 6] {
        for _ in 0..4 {
            let l = random_latin_square(n, &mut rng);
            let (_, counts) = species::min_reduced_member(&l);
            let m = MolsList::single(l);
            assert_eq!(num_bigint::BigInt::from(counts.par), canon::par_order(&m));
            assert_eq!(num_bigint::BigInt::from(counts.atp), canon::atp_order(&m));
        }
    }
    // A pair: the list search against the graph automorphism group.
    let pair = MolsList::new(vec![l_x(1), l_x(2)]).unwrap();
    let rep = species::list_min_rep(&pair);
    let canon_data = species::list_canon(&rep);
    assert_eq!(
        num_bigint::BigInt::from(canon_data.par),
        canon::par_order(&pair)
    );
}

/// The graph route on the one really symmetric order-9 square it is still
/// comfortable with; the member route for both group tables.
#[test]
fn order9_group_table_symmetries() {
    let ea9 = LatinSquare::elementary_abelian(9);
    let (_, counts) = species::min_reduced_member(&ea9);
    assert_eq!(counts.par, 23328);
    let z9 = LatinSquare::cyclic(9);
    let (_, counts) = species::min_reduced_member(&z9);
    assert_eq!(counts.par, 2916);
    // Graph automorphism group of the EA9 array agrees.
    assert_eq!(
        canon::par_order(&MolsList::single(ea9)),
        num_bigint::BigInt::from(23328)
    );
}

#[test]
fn aspect_species_multiset_is_a_paratopism_invariant() {
    let mut rng = SplitMix64::new(555);
    let pair = MolsList::new(vec![l_x(1), l_x(2)]).unwrap();
    let multiset = |m: &MolsList| {
        let mut certs: Vec<_> = m
            .aspects()
            .iter()
            .map(canon::square_species_certificate)
            .collect();
        certs.sort();
        certs
    };
    let reference = multiset(&pair);
    for _ in 0..10 {
        let image = random_paratopism_image(&pair, &mut rng);
        assert_eq!(multiset(&image), reference);
    }
}
