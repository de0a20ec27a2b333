//! The extension criterion agrees with full membership, and amalgamation
//! stays in the class, on seeded random inputs.

use collapse_core::amalgam::{amalgamate, free_amalgam, AmalgamOptions, Mode, Subcase};
use collapse_core::codes::Catalogue;
use collapse_core::collapse::{check_extension, check_membership, Membership, MuSpec};
use collapse_core::colored::SubsetHandle;
use collapse_core::extensions::is_minimal;
use collapse_core::samples::{random_minimal_extension, random_triple};
use collapse_core::GeometryKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 1 << 20;

fn setting(seed: u64) -> (GeometryKind, Catalogue, MuSpec) {
    let p = if seed.is_multiple_of(3) { 3 } else { 2 };
    let geom = if seed.is_multiple_of(5) {
        GeometryKind::LinearFiniteField { q: 5 }
    } else {
        GeometryKind::LinearRational
    };
    let cat = Catalogue::lines(p);
    let spec = MuSpec::new(&cat, p).unwrap();
    (geom, cat, spec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extension_verdict_matches_membership(seed in any::<u64>()) {
        let (geom, cat, spec) = setting(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mp, m) = random_minimal_extension(geom, &cat, &spec, 8, BUDGET, &mut rng);
        let v = check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap();
        let full = check_membership(&mp, &cat, &spec, BUDGET).unwrap();
        let decided = !matches!(full, Membership::NotRefuted { .. });
        prop_assert!(decided);
        let (x, y) = (v.in_class(), full.is_member());
        prop_assert!(x == y, "{:?} vs {:?}", v, full);
    }

    #[test]
    fn amalgamation_stays_in_the_class(seed in any::<u64>()) {
        let (geom, cat, spec) = setting(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, a, b) = random_triple(geom, &cat, &spec, 8, BUDGET, &mut rng);
        let r = amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()).unwrap();
        prop_assert!(check_membership(&r.extended, &cat, &spec, BUDGET).unwrap().is_member());
        prop_assert!(r.extended.is_self_sufficient(&m.all()).unwrap());
        let image: SubsetHandle = r.embedding.values().cloned().collect();
        prop_assert!(r.extended.is_self_sufficient(&image).unwrap());
        for id in b.ids() {
            prop_assert_eq!(&r.embedding[id], id);
        }
        let copied = r.trace.iter().any(|t| matches!(t.subcase, Subcase::CopyA | Subcase::CopyB));
        prop_assert_eq!(copied, r.mode == Mode::InternalCopy);
    }

    #[test]
    fn free_amalgam_embeds_both_sides(seed in any::<u64>()) {
        let (geom, cat, spec) = setting(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, a, b) = random_triple(geom, &cat, &spec, 8, BUDGET, &mut rng);
        let f = free_amalgam(&m, &a, &b).unwrap();
        let s = &f.structure;
        prop_assert!(s.is_self_sufficient(&m.all()).unwrap());
        let image: SubsetHandle = f.embedding.values().cloned().collect();
        prop_assert!(s.is_self_sufficient(&image).unwrap());
        let expect = m.rank(&m.all()).unwrap() + a.rank(&a.all()).unwrap() - a.rank(&b).unwrap();
        prop_assert_eq!(s.rank(&s.all()).unwrap(), expect);
        if is_minimal(&b, &a.all(), &a).unwrap() {
            prop_assert!(is_minimal(&m.all(), &s.all(), s).unwrap());
        }
    }
}
