use super::*;
use crate::amalgam::{build_rich, RichConfig, TaskKind};

fn lin() -> GeometryKind {
    GeometryKind::LinearRational
}

fn pt(id: &str, v: &[i64], c: Color) -> (GeometryPoint, Color) {
    (GeometryPoint::new(id, Payload::rational_ints(v)), c)
}

fn ids(xs: &[&str]) -> Vec<PointId> {
    xs.iter().map(|&x| PointId::from(x)).collect()
}

#[test]
fn singleton_ranks() {
    for p in 2..5 {
        let m = ColoredStructure::new(
            lin(),
            p,
            alloc::vec![pt("w", &[1], Color::White), pt("k", &[0, 1], Color::Black)],
        )
        .unwrap();
        let none = SubsetHandle::new();
        assert_eq!(d_rank(&ids(&["w"]), &none, &m).unwrap().d, p as i64);
        assert_eq!(d_rank(&ids(&["k"]), &none, &m).unwrap().d, p as i64 - 1);
        let c = m.handle(["w"]).unwrap();
        assert_eq!(d_rank(&ids(&["w"]), &c, &m).unwrap().d, 0);
        assert!(matches!(
            d_rank(&ids(&["z"]), &none, &m),
            Err(Error::UnknownId(_))
        ));
    }
}

#[test]
fn closure_lowers_rank() {
    // k2 = 2·k1 makes cl(k1) = {k1, k2} with δ = p − 2
    let m = ColoredStructure::new(
        lin(),
        3,
        alloc::vec![pt("k1", &[1], Color::Black), pt("k2", &[2], Color::Black)],
    )
    .unwrap();
    let r = d_rank(&ids(&["k1"]), &SubsetHandle::new(), &m).unwrap();
    assert_eq!(r.closure_of_union, m.all());
    assert_eq!(r.d, 1);
}

#[test]
fn type_comparison() {
    let m = ColoredStructure::new(
        lin(),
        2,
        alloc::vec![pt("w", &[1], Color::White), pt("k", &[0, 1], Color::Black)],
    )
    .unwrap();
    let n =
        ColoredStructure::new(lin(), 2, alloc::vec![pt("v", &[0, 0, 3], Color::White)]).unwrap();
    let budget = 10_000;
    assert!(same_type(&ids(&["w"]), &m, &ids(&["w"]), &m, budget)
        .unwrap()
        .is_same());
    assert!(same_type(&ids(&["w"]), &m, &ids(&["v"]), &n, budget)
        .unwrap()
        .is_same());
    assert!(!same_type(&ids(&["w"]), &m, &ids(&["k"]), &m, budget)
        .unwrap()
        .is_same());
    assert!(
        !same_type(&ids(&["w", "k"]), &m, &ids(&["k", "w"]), &m, budget)
            .unwrap()
            .is_same()
    );
    assert!(
        !same_type(&ids(&["w", "w"]), &m, &ids(&["w", "k"]), &m, budget)
            .unwrap()
            .is_same()
    );
}

#[test]
fn type_sees_the_closure() {
    // a black point alone against one with a multiple in its closure
    let m = ColoredStructure::new(lin(), 3, alloc::vec![pt("k", &[1], Color::Black)]).unwrap();
    let n = ColoredStructure::new(
        lin(),
        3,
        alloc::vec![pt("k", &[1], Color::Black), pt("k2", &[2], Color::Black)],
    )
    .unwrap();
    assert!(!same_type(&ids(&["k"]), &m, &ids(&["k"]), &n, 1000)
        .unwrap()
        .is_same());
}

#[test]
fn sum_of_blacks() {
    for geom in [lin(), GeometryKind::AlgebraicFunctionField { n: 1 }] {
        for p in [2, 3] {
            let r = example_sum_blacks(p, geom, 1 << 20).unwrap();
            assert_eq!(r.d_a.d, p as i64, "{geom} p={p}");
            assert_eq!(r.blocks.len(), p as usize);
            assert!(r.d_parts.iter().all(|d| d.d == 1), "{geom} p={p}");
            assert!(r.delta_blocks.iter().all(|&d| d == 1));
        }
    }
}

#[test]
fn axioms_on_small_structures() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let empty = ColoredStructure::empty(lin(), 2).unwrap();
    let r = check_axioms(&empty, &cat, &spec, 1 << 20).unwrap();
    assert_eq!(r.status(2), Some(&AxiomStatus::Pass));
    assert_eq!(r.status(3), Some(&AxiomStatus::Pass));
    assert_eq!(r.status(5), Some(&AxiomStatus::Vacuous));
    assert_eq!(r.status(1), Some(&AxiomStatus::OutOfScope));

    // b white with three pairs over it
    let mut pts = alloc::vec![pt("b", &[1], Color::White)];
    for i in 0..3 {
        let mut x = alloc::vec![0; i + 2];
        x[i + 1] = 1;
        let mut y = x.clone();
        y[0] = 1;
        pts.push(pt(&alloc::format!("x{i}"), &x, Color::Black));
        pts.push(pt(&alloc::format!("y{i}"), &y, Color::Black));
    }
    let bad = ColoredStructure::new(lin(), 2, pts.clone()).unwrap();
    let r = check_axioms(&bad, &cat, &spec, 1 << 20).unwrap();
    assert!(r.status(3).unwrap().is_failure());
    let (mu, seq) = r.long_sequence.clone().unwrap();
    assert_eq!((mu, seq.len()), (2, 3));
    assert_eq!(r.status(5).unwrap(), &AxiomStatus::Pass);
    assert_eq!(r.parameters[0].clause, Clause::A);

    // one pair only: the generic extension over b is still in the class
    pts.truncate(3);
    let thin = ColoredStructure::new(lin(), 2, pts).unwrap();
    let r = check_axioms(&thin, &cat, &spec, 1 << 20).unwrap();
    assert!(r.status(5).unwrap().is_failure());
    assert_eq!(r.parameters[0].clause, Clause::Neither);
}

#[test]
fn closed_out_build_satisfies_the_axioms() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let cfg = RichConfig {
        geometry: lin(),
        p: 2,
        tasks: TaskKind::standard(&cat, &lin(), 2),
        steps: 15,
        seed: 3,
        budget: 1 << 20,
        verify_each_step: false,
        close_out: true,
    };
    let (m, _) = build_rich(&cfg, &cat, &spec).unwrap();
    let r = check_axioms(&m, &cat, &spec, 1 << 20).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.status(5), Some(&AxiomStatus::Pass));
    assert!(r.parameters.iter().all(|c| c.clause == Clause::A));
}

#[test]
fn conjugate_bound_values() {
    let cat = Catalogue::lines(3);
    let spec = MuSpec::new(&cat, 3).unwrap();
    let l3 = cat.get("L3").unwrap();
    assert_eq!(conjugate_bound(l3.as_ref(), &spec).unwrap(), 6 * 5);
}
