//! Laws of the predimension and of self-sufficiency on random structures,
//! against brute force over bitmasks.

use collapse_core::colored::{ColoredStructure, SubsetHandle};
use collapse_core::samples::{random_geometry, random_structure};
use collapse_core::PointId;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, max: usize) -> ColoredStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = random_geometry(&mut rng);
    let p = 2 + (seed % 3) as u32;
    let n = 1 + (seed / 3 % max as u64) as usize;
    random_structure(geom, p, n, 3, &mut rng)
}

fn handle(ids: &[PointId], mask: usize) -> SubsetHandle {
    ids.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, id)| id.clone())
        .collect()
}

fn sub(a: usize, b: usize) -> bool {
    a & !b == 0
}

/// `y ≤ x` from the δ table.
fn ss(d: &[i64], y: usize, x: usize) -> bool {
    let rest = x & !y;
    let mut z = rest;
    loop {
        if d[y | z] < d[y] {
            return false;
        }
        if z == 0 {
            return true;
        }
        z = (z - 1) & rest;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn delta_table_agrees_with_delta(seed in any::<u64>()) {
        let m = sample(seed, 6);
        let (ids, d) = m.delta_table().unwrap();
        for (mask, v) in d.iter().enumerate() {
            prop_assert_eq!(m.delta(&handle(&ids, mask)).unwrap(), *v);
        }
    }

    #[test]
    fn delta_is_submodular(seed in any::<u64>()) {
        let m = sample(seed, 7);
        let (_, d) = m.delta_table().unwrap();
        prop_assert_eq!(d[0], 0);
        for a in 0..d.len() {
            for b in 0..d.len() {
                prop_assert!(d[a | b] + d[a & b] <= d[a] + d[b]);
            }
        }
    }

    #[test]
    fn relative_delta_decreases_with_the_base(seed in any::<u64>()) {
        let m = sample(seed, 6);
        let (ids, d) = m.delta_table().unwrap();
        let n = d.len();
        for c in 0..n {
            for b in (0..n).filter(|&b| sub(b, c)) {
                for a in (0..n).filter(|&a| a & c == 0) {
                    prop_assert!(d[a | c] - d[c] <= d[a | b] - d[b]);
                }
            }
        }
        // and through the public relative form
        let (a, b) = (handle(&ids, 1), handle(&ids, 0));
        prop_assert_eq!(m.delta_rel(&a, &b).unwrap(), d[1]);
    }

    #[test]
    fn self_sufficiency_matches_brute_force(seed in any::<u64>()) {
        let m = sample(seed, 7);
        let (ids, d) = m.delta_table().unwrap();
        let whole = d.len() - 1;
        for y in 0..d.len() {
            prop_assert_eq!(m.is_self_sufficient(&handle(&ids, y)).unwrap(), ss(&d, y, whole));
        }
    }

    #[test]
    fn self_sufficiency_is_transitive(seed in any::<u64>()) {
        let m = sample(seed, 6);
        let (_, d) = m.delta_table().unwrap();
        let n = d.len();
        for x in 0..n {
            for y in (0..n).filter(|&y| sub(y, x) && ss(&d, y, x)) {
                for z in (0..n).filter(|&z| sub(x, z) && ss(&d, x, z)) {
                    prop_assert!(ss(&d, y, z));
                }
            }
        }
    }

    #[test]
    fn closure_is_the_least_self_sufficient_superset(seed in any::<u64>()) {
        let m = sample(seed, 7);
        let (ids, d) = m.delta_table().unwrap();
        let whole = d.len() - 1;
        for s in (0..d.len()).filter(|s: &usize| s.count_ones() <= 2) {
            let best = (0..d.len())
                .filter(|&z| sub(s, z) && ss(&d, z, whole))
                .min_by_key(|z| z.count_ones())
                .unwrap();
            let c = m.self_sufficient_closure(&handle(&ids, s)).unwrap();
            prop_assert_eq!(&c, &handle(&ids, best));
            prop_assert_eq!(m.self_sufficient_closure(&c).unwrap(), c);
        }
    }
}
