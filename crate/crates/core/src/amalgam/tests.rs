use super::*;
use crate::codes::Catalogue;
use crate::pregeometry::GeometryKind;

fn lin() -> GeometryKind {
    GeometryKind::LinearRational
}

fn pt(id: &str, v: &[i64], c: Color) -> (GeometryPoint, Color) {
    (GeometryPoint::new(id, Payload::rational_ints(v)), c)
}

#[test]
fn trivial_amalgam_is_identity() {
    let m = ColoredStructure::new(
        lin(),
        2,
        alloc::vec![pt("x", &[1], Color::Black), pt("w", &[0, 1], Color::White)],
    )
    .unwrap();
    let a = m.restrict(&m.handle(["x"]).unwrap()).unwrap();
    let b = a.all();
    let f = free_amalgam(&m, &a, &b).unwrap();
    assert_eq!(f.structure, m);
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let r = amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()).unwrap();
    assert_eq!(r.extended, m);
    assert!(r.trace.is_empty());
    assert_eq!(r.mode, Mode::Free);
    assert_eq!(
        r.embedding.get(&PointId::from("x")),
        Some(&PointId::from("x"))
    );
}

#[test]
fn free_amalgam_of_two_blacks() {
    for p in 2..5 {
        let m = ColoredStructure::new(lin(), p, alloc::vec![pt("m", &[1], Color::Black)]).unwrap();
        let a = ColoredStructure::new(lin(), p, alloc::vec![pt("a", &[1], Color::Black)]).unwrap();
        let f = free_amalgam(&m, &a, &SubsetHandle::new()).unwrap();
        let s = &f.structure;
        assert_eq!(s.rank(&s.all()).unwrap(), 2);
        assert_eq!(s.delta(&s.all()).unwrap(), 2 * p as i64 - 2);
        assert_eq!(f.embedding[&PointId::from("a")], PointId::from("a"));
    }
}

#[test]
fn white_transcendental_step_is_free() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let m = ColoredStructure::new(lin(), 2, alloc::vec![pt("b", &[1], Color::White)]).unwrap();
    let a = ColoredStructure::new(
        lin(),
        2,
        alloc::vec![pt("b", &[1], Color::White), pt("w", &[0, 1], Color::White)],
    )
    .unwrap();
    let r = amalgamate(&m, &a, &m.all(), &cat, &spec, &AmalgamOptions::default()).unwrap();
    assert_eq!(r.trace.len(), 1);
    assert_eq!(r.trace[0].subcase, Subcase::WhiteNew);
    assert_eq!(r.extended.len(), 2);
}

#[test]
fn algebraic_white_point_is_found_inside() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    // M has x, y and their sum white; A copies x, y and adds the sum again.
    let m = ColoredStructure::new(
        lin(),
        2,
        alloc::vec![
            pt("x", &[1], Color::White),
            pt("y", &[0, 1], Color::White),
            pt("s", &[1, 1], Color::White)
        ],
    )
    .unwrap();
    let a = ColoredStructure::new(
        lin(),
        2,
        alloc::vec![
            pt("x", &[1], Color::White),
            pt("y", &[0, 1], Color::White),
            pt("z", &[1, 1], Color::White)
        ],
    )
    .unwrap();
    let b = m.handle(["x", "y"]).unwrap();
    let r = amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()).unwrap();
    assert_eq!(r.trace[0].subcase, Subcase::WhiteInternal);
    assert_eq!(r.embedding[&PointId::from("z")], PointId::from("s"));
    assert_eq!(r.extended, m);
}

/// `b` white and `k` black pairs `(x_i, x_i + b)`.
fn pairs(k: usize, prefix: &str, offset: usize) -> Vec<(GeometryPoint, Color)> {
    let mut out = alloc::vec![pt("b", &[1], Color::White)];
    for i in 0..k {
        let mut x = alloc::vec![0; offset + i + 2];
        x[offset + i + 1] = 1;
        let mut y = x.clone();
        y[0] = 1;
        out.push(pt(&alloc::format!("{prefix}x{i}"), &x, Color::Black));
        out.push(pt(&alloc::format!("{prefix}y{i}"), &y, Color::Black));
    }
    out
}

#[test]
fn saturated_pair_step_is_copied() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let m = ColoredStructure::new(lin(), 2, pairs(2, "m", 0)).unwrap();
    let a = ColoredStructure::new(lin(), 2, pairs(1, "a", 0)).unwrap();
    let b = m.handle(["b"]).unwrap();
    let r = amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()).unwrap();
    assert_eq!(r.mode, Mode::InternalCopy);
    assert_eq!(r.trace.len(), 1);
    assert_eq!(r.trace[0].subcase, Subcase::CopyA);
    assert_eq!(r.extended, m);
    let img = &r.embedding[&PointId::from("ax0")];
    assert!(img.as_str().starts_with("mx"));
    assert!(check_membership(&r.extended, &cat, &spec, 1 << 20)
        .unwrap()
        .is_member());
}

#[test]
fn unsaturated_pair_step_is_free() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let m = ColoredStructure::new(lin(), 2, pairs(1, "m", 0)).unwrap();
    let a = ColoredStructure::new(lin(), 2, pairs(1, "a", 0)).unwrap();
    let b = m.handle(["b"]).unwrap();
    let r = amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()).unwrap();
    assert_eq!(r.mode, Mode::Free);
    assert_eq!(r.trace[0].subcase, Subcase::Free);
    assert_eq!(r.extended.len(), 5);
}

#[test]
fn inputs_outside_the_class_are_rejected() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let m = ColoredStructure::new(lin(), 2, pairs(3, "m", 0)).unwrap();
    let a = ColoredStructure::new(lin(), 2, pairs(0, "a", 0)).unwrap();
    let b = m.handle(["b"]).unwrap();
    assert!(matches!(
        amalgamate(&m, &a, &b, &cat, &spec, &AmalgamOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn empty_build() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let cfg = RichConfig {
        geometry: lin(),
        p: 2,
        tasks: TaskKind::standard(&cat, &lin(), 2),
        steps: 0,
        seed: 1,
        budget: 1 << 20,
        verify_each_step: true,
        close_out: false,
    };
    let (m, log) = build_rich(&cfg, &cat, &spec).unwrap();
    assert!(m.is_empty());
    assert!(log.records.is_empty());
}

#[test]
fn small_build_stays_in_class() {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let cfg = RichConfig {
        geometry: lin(),
        p: 2,
        tasks: TaskKind::standard(&cat, &lin(), 2),
        steps: 25,
        seed: 7,
        budget: 1 << 20,
        verify_each_step: true,
        close_out: false,
    };
    let (m, log) = build_rich(&cfg, &cat, &spec).unwrap();
    assert_eq!(log.records.len(), 25);
    assert!(log
        .records
        .iter()
        .all(|r| r.membership.as_deref() == Some("member")));
    assert!(check_membership(&m, &cat, &spec, 1 << 20)
        .unwrap()
        .is_member());
    let again = build_rich(&cfg, &cat, &spec).unwrap();
    assert_eq!(again.0, m);
    assert_eq!(again.1, log);
}
