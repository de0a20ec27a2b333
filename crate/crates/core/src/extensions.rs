//! Minimal self-sufficient extensions: detection, decomposition of an
//! arbitrary extension `B ≤ A` into a chain of minimal ones, and the
//! classification of a minimal step as white-algebraic, white-transcendental
//! or black.
//!
//! `B ≤ A` is minimal when no `Y'` with `B ⊊ Y' ⊊ A` satisfies `Y' ≤ A`.
//! Equivalently `δ(A) < δ(Y')` for every such `Y'`: if `δ(Y') ≤ δ(A)` then
//! the closure of `Y'` inside `A` is a proper self-sufficient intermediate
//! set, and a self-sufficient `Y'` has `δ(A/Y') ≥ 0`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::colored::{Color, ColoredStructure, SubsetHandle, HARD_LIMIT};
use crate::error::{Error, Result};
use crate::pregeometry::PointId;
use crate::subsets;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtensionCase {
    WhiteAlgebraic,
    WhiteTranscendental,
    Black,
}

impl ExtensionCase {
    pub fn name(self) -> &'static str {
        match self {
            ExtensionCase::WhiteAlgebraic => "white-algebraic",
            ExtensionCase::WhiteTranscendental => "white-transcendental",
            ExtensionCase::Black => "black",
        }
    }
}

impl fmt::Display for ExtensionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One instance of `p·rank(A / B ∪ S) < n − |S|`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InequalityCheck {
    pub s: SubsetHandle,
    pub lhs: i64,
    pub rhs: i64,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        self.lhs < self.rhs
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtensionReport {
    pub case: ExtensionCase,
    pub delta: i64,
    /// The points of `A∖B`, ordered by id.
    pub new_points: Vec<PointId>,
    /// Empty unless the case is black.
    pub inequalities: Vec<InequalityCheck>,
    pub is_good: bool,
}

fn check_contained(b: &SubsetHandle, a: &SubsetHandle) -> Result<()> {
    if !b.is_subset(a) {
        return Err(Error::Precondition(alloc::format!(
            "{b} is not contained in {a}"
        )));
    }
    Ok(())
}

fn require_self_sufficient(m: &ColoredStructure, b: &SubsetHandle, a: &SubsetHandle) -> Result<()> {
    check_contained(b, a)?;
    if !m.is_self_sufficient_in(b, a)? {
        return Err(Error::NotSelfSufficient(alloc::format!("{b} in {a}")));
    }
    Ok(())
}

fn too_large(size: usize) -> Error {
    Error::TooLarge {
        what: "extension",
        size,
        limit: HARD_LIMIT,
    }
}

/// Whether `B ≤ A` is a minimal extension. `A = B` is not.
pub fn is_minimal(b: &SubsetHandle, a: &SubsetHandle, m: &ColoredStructure) -> Result<bool> {
    require_self_sufficient(m, b, a)?;
    let bi = m.indices(b)?;
    let new = m.indices(&a.difference(b))?;
    if new.is_empty() {
        return Ok(false);
    }
    if new.len() > HARD_LIMIT {
        return Err(too_large(new.len()));
    }
    let ranks = m.rows().rank_table_over(&bi, &new);
    let p = m.p() as i64;
    let base_black = bi.iter().filter(|&&i| m.color_at(i).is_black()).count() as i64;
    let delta = |mask: usize| {
        let blacks = (0..new.len())
            .filter(|&k| mask & (1 << k) != 0 && m.color_at(new[k]).is_black())
            .count() as i64;
        p * ranks[mask] as i64 - base_black - blacks
    };
    let full = (1usize << new.len()) - 1;
    let top = delta(full);
    Ok((1..full).all(|mask| delta(mask) > top))
}

/// A chain `B = C₀ ≤ C₁ ≤ … ≤ C_k = A` of minimal extensions. Each `C_{i+1}`
/// is the smallest (then lexicographically least) `D` with `C_i ⊊ D ≤ A`;
/// such a `D` is automatically minimal over `C_i`.
pub fn decompose_minimal(
    b: &SubsetHandle,
    a: &SubsetHandle,
    m: &ColoredStructure,
) -> Result<Vec<SubsetHandle>> {
    require_self_sufficient(m, b, a)?;
    let mut chain = alloc::vec![b.clone()];
    let mut cur = b.clone();
    while cur != *a {
        let rest: Vec<PointId> = a.difference(&cur).ids().cloned().collect();
        if rest.len() > HARD_LIMIT {
            return Err(too_large(rest.len()));
        }
        let mut next = None;
        'search: for k in 1..=rest.len() {
            for pick in subsets::Combinations::new(rest.len(), k) {
                let mut d = cur.clone();
                for j in pick {
                    d.insert(rest[j].clone());
                }
                if m.is_self_sufficient_in(&d, a)? {
                    next = Some(d);
                    break 'search;
                }
            }
        }
        cur = next.expect("A itself is self-sufficient in A");
        chain.push(cur.clone());
    }
    Ok(chain)
}

/// Classifies a minimal extension.
pub fn classify_minimal(
    b: &SubsetHandle,
    a: &SubsetHandle,
    m: &ColoredStructure,
) -> Result<ExtensionReport> {
    if !is_minimal(b, a, m)? {
        return Err(Error::Precondition(alloc::format!(
            "{b} ≤ {a} is not minimal"
        )));
    }
    let p = m.p() as i64;
    let new = a.difference(b);
    let new_points: Vec<PointId> = new.ids().cloned().collect();
    let delta = m.delta_rel(a, b)?;
    let whites: Vec<&PointId> = new
        .ids()
        .filter(|id| m.color(id) == Some(Color::White))
        .collect();
    if !whites.is_empty() {
        if new.len() != 1 {
            return Err(Error::Classification(alloc::format!(
                "minimal extension by {new} contains white point {} but is not a single point",
                whites[0]
            )));
        }
        let case = match delta {
            0 => ExtensionCase::WhiteAlgebraic,
            d if d == p => ExtensionCase::WhiteTranscendental,
            d => {
                return Err(Error::Classification(alloc::format!(
                    "white point {} has relative δ {d}",
                    whites[0]
                )))
            }
        };
        return Ok(ExtensionReport {
            case,
            delta,
            new_points,
            inequalities: Vec::new(),
            is_good: false,
        });
    }
    if !(0..p).contains(&delta) {
        return Err(Error::Classification(alloc::format!(
            "black minimal extension by {new} has δ {delta} outside [0, {}]",
            p - 1
        )));
    }
    if delta == p - 1 && new.len() != 1 {
        return Err(Error::Classification(alloc::format!(
            "black minimal extension by {new} has δ = p−1 but {} points",
            new.len()
        )));
    }
    let n = new.len() as i64;
    let rank_a = m.rank(a)? as i64;
    let mut inequalities = Vec::new();
    for pick in subsets::by_size(new_points.len()) {
        if pick.is_empty() || pick.len() == new_points.len() {
            continue;
        }
        let s: SubsetHandle = pick.iter().map(|&j| new_points[j].clone()).collect();
        let rr = rank_a - m.rank(&b.union(&s))? as i64;
        let check = InequalityCheck {
            lhs: p * rr,
            rhs: n - s.len() as i64,
            s,
        };
        if !check.holds() {
            return Err(Error::Classification(alloc::format!(
                "p·rank(A/B∪{}) = {} is not below {}",
                check.s,
                check.lhs,
                check.rhs
            )));
        }
        inequalities.push(check);
    }
    let is_good = delta == 0 && genericity_proxy(b, a, m)?;
    Ok(ExtensionReport {
        case: ExtensionCase::Black,
        delta,
        new_points,
        inequalities,
        is_good,
    })
}

/// Points of `M` in the matroid closure of `A` that are also in the matroid
/// closure of `B` lie in `B`, and no point of `A∖B` is in the closure of `B`.
fn genericity_proxy(b: &SubsetHandle, a: &SubsetHandle, m: &ColoredStructure) -> Result<bool> {
    let bi = m.indices(b)?;
    let ai = m.indices(a)?;
    let rb = m.rank_idx(&bi);
    let ra = m.rank_idx(&ai);
    let with = |base: &[usize], i: usize| {
        let mut v = base.to_vec();
        v.push(i);
        m.rank_idx(&v)
    };
    for i in 0..m.len() {
        if bi.contains(&i) {
            continue;
        }
        if with(&bi, i) == rb && with(&ai, i) == ra {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A good extension: minimal, black, `δ(A/B) = 0`, and generic in the
/// sense of the proxy above.
pub fn is_good_extension(b: &SubsetHandle, a: &SubsetHandle, m: &ColoredStructure) -> Result<bool> {
    let report = classify_minimal(b, a, m)?;
    if report.case != ExtensionCase::Black {
        return Err(Error::Precondition(alloc::format!(
            "{a} over {b} is a {} extension",
            report.case
        )));
    }
    Ok(report.is_good)
}

impl ExtensionReport {
    pub fn summary(&self) -> String {
        alloc::format!(
            "{} δ={} new={} good={}",
            self.case,
            self.delta,
            self.new_points.len(),
            self.is_good
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pregeometry::{GeometryKind, GeometryPoint, Payload};

    fn pt(id: &str, v: &[i64], c: Color) -> (GeometryPoint, Color) {
        (GeometryPoint::new(id, Payload::rational_ints(v)), c)
    }

    fn h(ids: &[&str]) -> SubsetHandle {
        SubsetHandle::from_ids(ids.iter().copied())
    }

    /// White parameter `b = e1`, good pair `x = e2`, `x + b`.
    fn good_pair() -> ColoredStructure {
        ColoredStructure::new(
            GeometryKind::LinearRational,
            2,
            alloc::vec![
                pt("b", &[1, 0, 0], Color::White),
                pt("x1", &[0, 1, 0], Color::Black),
                pt("x2", &[1, 1, 0], Color::Black),
                pt("y", &[0, 0, 1], Color::Black),
            ],
        )
        .unwrap()
    }

    #[test]
    fn minimality_examples() {
        let m = good_pair();
        assert!(is_minimal(&h(&["b"]), &h(&["b", "y"]), &m).unwrap());
        assert!(is_minimal(&h(&["b"]), &h(&["b", "x1", "x2"]), &m).unwrap());
        assert!(!is_minimal(&h(&["b"]), &h(&["b", "x1", "y"]), &m).unwrap());
        let e = ColoredStructure::new(
            GeometryKind::LinearRational,
            2,
            alloc::vec![
                pt("e1", &[1, 0], Color::Black),
                pt("e2", &[0, 1], Color::Black)
            ],
        )
        .unwrap();
        assert!(!is_minimal(&h(&[]), &e.all(), &e).unwrap());
        let r = is_minimal(&h(&["b", "x1"]), &h(&["b", "x1", "x2"]), &m);
        assert!(matches!(r, Err(Error::NotSelfSufficient(_))));
    }

    #[test]
    fn decomposition_orders_steps() {
        let m = good_pair();
        let chain = decompose_minimal(&h(&["b"]), &m.all(), &m).unwrap();
        assert_eq!(chain, alloc::vec![h(&["b"]), h(&["b", "y"]), m.all()]);
        assert_eq!(
            decompose_minimal(&h(&["b"]), &h(&["b"]), &m).unwrap().len(),
            1
        );
    }

    #[test]
    fn classification_examples() {
        let m = good_pair();
        let r = classify_minimal(&h(&["b"]), &h(&["b", "x1", "x2"]), &m).unwrap();
        assert_eq!(r.case, ExtensionCase::Black);
        assert_eq!(r.delta, 0);
        assert_eq!(r.inequalities.len(), 2);
        assert!(r.inequalities.iter().all(|c| c.lhs == 0 && c.rhs == 1));
        assert!(r.is_good);
        let r = classify_minimal(&h(&["b"]), &h(&["b", "y"]), &m).unwrap();
        assert_eq!(
            (r.case, r.delta, r.is_good),
            (ExtensionCase::Black, 1, false)
        );
        let w = m
            .extend(alloc::vec![
                pt("w", &[2, 0, 0], Color::White),
                pt("z", &[0, 0, 0, 1], Color::White),
            ])
            .unwrap();
        let r = classify_minimal(&h(&["b"]), &h(&["b", "w"]), &w).unwrap();
        assert_eq!((r.case, r.delta), (ExtensionCase::WhiteAlgebraic, 0));
        let r = classify_minimal(&h(&["b"]), &h(&["b", "z"]), &w).unwrap();
        assert_eq!((r.case, r.delta), (ExtensionCase::WhiteTranscendental, 2));
    }
}
