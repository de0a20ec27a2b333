use alloc::sync::Arc;
use alloc::vec::Vec;

use super::*;
use crate::codes::{LinearTemplate, DEFAULT_TUPLE_BUDGET};
use crate::pregeometry::{GeometryKind, Payload};

const LIN: GeometryKind = GeometryKind::LinearRational;
const BUDGET: u64 = DEFAULT_TUPLE_BUDGET;

fn pt(id: &str, xs: &[i64], c: Color) -> (GeometryPoint, Color) {
    (GeometryPoint::new(id, Payload::rational_ints(xs)), c)
}

fn h(ids: &[&str]) -> SubsetHandle {
    SubsetHandle::from_ids(ids.iter().copied())
}

fn pairs(k: usize) -> Vec<(GeometryPoint, Color)> {
    let mut out = alloc::vec![pt("b", &[1], Color::White)];
    for i in 1..=k {
        let mut x = alloc::vec![0i64; i + 1];
        x[i] = 1;
        let mut y = x.clone();
        y[0] = 1;
        out.push(pt(&alloc::format!("x{i}"), &x, Color::Black));
        out.push(pt(&alloc::format!("y{i}"), &y, Color::Black));
    }
    out
}

fn l2() -> (Catalogue, MuSpec) {
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).unwrap();
    (cat, spec)
}

#[derive(Debug)]
struct TwoRecovery(LinearTemplate);

impl CodeTemplate for TwoRecovery {
    fn name(&self) -> &str {
        "R2"
    }
    fn arity(&self) -> usize {
        2
    }
    fn rank(&self) -> usize {
        1
    }
    fn recovery_arity(&self) -> usize {
        2
    }
    fn param_arity(&self) -> usize {
        1
    }
    fn supports(&self, geom: &GeometryKind) -> bool {
        self.0.supports(geom)
    }
    fn constraint(&self, xs: &[Payload], b: &[Payload], geom: &GeometryKind) -> bool {
        self.0.constraint(xs, b, geom)
    }
    fn recover(&self, t: &[&[Payload]], geom: &GeometryKind) -> Option<Param> {
        self.0.recover(&t[..1], geom)
    }
    fn build(&self, b: &[Payload], g: &[Payload], geom: &GeometryKind) -> Option<Vec<Payload>> {
        self.0.build(b, g, geom)
    }
    fn sample_parameter(&self, geom: &GeometryKind, rng: &mut dyn rand::RngCore) -> Option<Param> {
        self.0.sample_parameter(geom, rng)
    }
}

#[test]
fn mu_values() {
    let (cat, spec) = l2();
    assert_eq!(mu(cat.get("L2").unwrap().as_ref(), &spec).unwrap(), 2);
    let cat3 = Catalogue::lines(3);
    let spec3 = MuSpec::new(&cat3, 3).unwrap();
    for t in cat3.iter() {
        assert_eq!(spec3.mu(t.as_ref()).unwrap(), 5, "{}", t.name());
    }
    let spec = spec.with_mu_star(&cat, "L2", 4).unwrap();
    assert_eq!(spec.mu(cat.get("L2").unwrap().as_ref()).unwrap(), 6);
}

#[test]
fn mu_star_floor_and_unknown_names() {
    let cat = Catalogue::unclosed(alloc::vec![
        Arc::new(TwoRecovery(LinearTemplate::line(2))) as Arc<dyn CodeTemplate>
    ]);
    let spec = MuSpec::new(&cat, 2).unwrap();
    let r2 = cat.get("R2").unwrap();
    assert_eq!(spec.mu_star(r2.as_ref()).unwrap(), 1);
    // ((2−1)(2−1)+1)·2 + 1
    assert_eq!(spec.mu(r2.as_ref()).unwrap(), 5);
    assert!(matches!(
        spec.clone().with_mu_star(&cat, "R2", 0),
        Err(Error::InvalidMu(_))
    ));
    assert!(matches!(
        spec.with_mu_star(&cat, "L9", 3),
        Err(Error::UnknownTemplate(_))
    ));
    let (cat2, spec2) = l2();
    assert!(matches!(
        spec2.mu(r2.as_ref()),
        Err(Error::UnknownTemplate(_))
    ));
    assert!(matches!(MuSpec::new(&cat2, 1), Err(Error::InvalidP(1))));
}

#[test]
fn leading_term_constraints() {
    let cat = Catalogue::lines(3);
    let spec = MuSpec::new(&cat, 3).unwrap();
    let low: LeadingTerm = Arc::new(|_, _| 1);
    assert!(matches!(
        spec.clone().with_leading(&cat, low),
        Err(Error::InvalidMu(_))
    ));
    let uneven: LeadingTerm =
        Arc::new(|c, p| standard_leading(c, p) + c.permutation().map_or(0, |_| 1));
    assert!(matches!(
        spec.clone().with_leading(&cat, uneven),
        Err(Error::InvalidMu(_))
    ));
    let plus: LeadingTerm = Arc::new(|c, p| standard_leading(c, p) + 2);
    let spec = spec.with_leading(&cat, plus).unwrap();
    assert_eq!(spec.mu(cat.get("L3").unwrap().as_ref()).unwrap(), 7);
}

#[test]
fn membership_verdicts() {
    let (cat, spec) = l2();
    let whites = ColoredStructure::new(
        LIN,
        2,
        alloc::vec![
            pt("a", &[1], Color::White),
            pt("c", &[0, 1], Color::White),
            pt("d", &[1, 1], Color::White)
        ],
    )
    .unwrap();
    assert_eq!(
        check_membership(&whites, &cat, &spec, BUDGET).unwrap(),
        Membership::Member
    );

    let flat = ColoredStructure::new(
        LIN,
        2,
        alloc::vec![
            pt("a", &[1], Color::Black),
            pt("c", &[2], Color::Black),
            pt("d", &[3], Color::Black),
        ],
    )
    .unwrap();
    match check_membership(&flat, &cat, &spec, BUDGET).unwrap() {
        Membership::NegativeDelta { witness } => assert!(flat.delta(&witness).unwrap() < 0),
        v => panic!("{v:?}"),
    }

    let two = ColoredStructure::new(LIN, 2, pairs(2)).unwrap();
    assert!(check_membership(&two, &cat, &spec, BUDGET)
        .unwrap()
        .is_member());
    let three = ColoredStructure::new(LIN, 2, pairs(3)).unwrap();
    match check_membership(&three, &cat, &spec, BUDGET).unwrap() {
        Membership::LongSequence { mu, sequence } => {
            assert_eq!(mu, 2);
            assert_eq!(sequence.len(), 3);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn white_point_extension_is_in_class() {
    let (cat, spec) = l2();
    let mut pts = pairs(2);
    pts.push(pt("w", &[0, 0, 0, 1], Color::White));
    let mp = ColoredStructure::new(LIN, 2, pts).unwrap();
    let m = h(&["b", "x1", "y1", "x2", "y2"]);
    assert_eq!(
        check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap(),
        ExtensionVerdict::NewWhitePoint
    );
}

#[test]
fn third_pair_fails_a() {
    let (cat, spec) = l2();
    let mp = ColoredStructure::new(LIN, 2, pairs(3)).unwrap();
    let m = h(&["b", "x1", "y1", "x2", "y2"]);
    match check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap() {
        ExtensionVerdict::FailsA {
            realization,
            sequence,
            enumerates_new,
            ..
        } => {
            assert_eq!(sequence.len(), 2);
            assert!(enumerates_new);
            let mut r = realization.clone();
            r.sort();
            assert_eq!(r, alloc::vec![PointId::from("x3"), PointId::from("y3")]);
        }
        v => panic!("{v:?}"),
    }
    // one pair in M: the second pair is fine
    let mp = ColoredStructure::new(LIN, 2, pairs(2)).unwrap();
    let m = h(&["b", "x1", "y1"]);
    assert_eq!(
        check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap(),
        ExtensionVerdict::InClass
    );
}

#[test]
fn black_transcendental_extension_is_in_class() {
    let (cat, spec) = l2();
    let mut pts = pairs(2);
    pts.push(pt("z", &[0, 0, 0, 1], Color::Black));
    let mp = ColoredStructure::new(LIN, 2, pts).unwrap();
    let m = h(&["b", "x1", "y1", "x2", "y2"]);
    assert_eq!(mp.delta_rel(&mp.all(), &m).unwrap(), 1);
    assert_eq!(
        check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap(),
        ExtensionVerdict::InClass
    );
}

/// Three pairs over `b = e3` with `x3 = x1 + x2` and `b` absent: a minimal
/// extension of the empty set with `δ = 0` whose pairs are all new.
fn hidden_parameter() -> ColoredStructure {
    ColoredStructure::new(
        LIN,
        2,
        alloc::vec![
            pt("x1", &[1, 0, 0], Color::Black),
            pt("y1", &[1, 0, 1], Color::Black),
            pt("x2", &[0, 1, 0], Color::Black),
            pt("y2", &[0, 1, 1], Color::Black),
            pt("x3", &[1, 1, 0], Color::Black),
            pt("y3", &[1, 1, 1], Color::Black),
        ],
    )
    .unwrap()
}

#[test]
fn hidden_parameter_fails_b() {
    let (cat, spec) = l2();
    let mp = hidden_parameter();
    let m = SubsetHandle::new();
    assert!(is_minimal(&m, &mp.all(), &mp).unwrap());
    match check_extension(&mp, &m, &cat, &spec, BUDGET).unwrap() {
        ExtensionVerdict::FailsB {
            sequence,
            new_tuples,
            ..
        } => {
            assert_eq!(sequence.len(), 3);
            assert_eq!(new_tuples, 3);
        }
        v => panic!("{v:?}"),
    }
    assert!(check_membership(&mp, &cat, &spec, BUDGET)
        .unwrap()
        .is_violation());
}

#[test]
fn extension_preconditions() {
    let (cat, spec) = l2();
    let mp = ColoredStructure::new(LIN, 2, pairs(2)).unwrap();
    // {x1} alone is not self-sufficient
    let r = check_extension(&mp, &h(&["b", "x1"]), &cat, &spec, BUDGET);
    assert!(matches!(r, Err(Error::NotSelfSufficient(_))));
    // two steps at once is not minimal
    let r = check_extension(&mp, &h(&["b"]), &cat, &spec, BUDGET);
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn generic_extension_clauses() {
    let (cat, spec) = l2();
    let l2t = cat.get("L2").unwrap().clone();
    let b = [Payload::rational_ints(&[1])];
    let two = ColoredStructure::new(LIN, 2, pairs(2)).unwrap();
    let g = generic_extension(&two, l2t.as_ref(), &b, &cat, &spec, "g", BUDGET).unwrap();
    assert_eq!(g.clause_a.as_ref().map(PseudoMorley::len), Some(2));
    assert!(!g.in_class());
    assert_eq!(g.new_points.len(), 2);
    let one = ColoredStructure::new(LIN, 2, pairs(1)).unwrap();
    let g = generic_extension(&one, l2t.as_ref(), &b, &cat, &spec, "g", BUDGET).unwrap();
    assert!(g.in_class());
    assert!(check_membership(&g.extended, &cat, &spec, BUDGET)
        .unwrap()
        .is_member());
    let v = check_extension(&g.extended, &one.all(), &cat, &spec, BUDGET).unwrap();
    assert_eq!(v, ExtensionVerdict::InClass);
}

#[test]
fn permuted_copies_are_skipped_only_with_their_base() {
    let cat = Catalogue::lines(3);
    let m = ColoredStructure::empty(LIN, 3).unwrap();
    let names: Vec<&str> = checked_templates(&cat, &m)
        .iter()
        .map(|t| t.name())
        .collect();
    assert_eq!(names, ["L3"]);
    let only_perm = Catalogue::unclosed(
        cat.iter()
            .filter(|t| t.permutation().is_some())
            .cloned()
            .collect(),
    );
    assert_eq!(checked_templates(&only_perm, &m).len(), 2);
}
