//! Colored structures and the δ-calculus.
//!
//! A [`ColoredStructure`] is a finite set of points of one geometry, each
//! painted black or white, together with the parameter `p`. The predimension
//! of a subset is `δ(A) = p·rank(A) − #black(A)`.
//!
//! Self-sufficiency and closures are decided exactly. Small universes are
//! enumerated; larger ones go through a matroid partition computation, since
//! `min_{A} δ(A ∪ Y) − δ(Y)` only depends on the black points outside `Y`
//! and equals `min_A p·r(A/Y) − |A|` over those.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::partition;
use crate::pregeometry::{GeometryKind, GeometryPoint, Payload, PointId, RowStore};
use crate::subsets;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn is_black(self) -> bool {
        self == Color::Black
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::White => "white",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of point ids, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SubsetHandle(BTreeSet<PointId>);

impl SubsetHandle {
    pub fn new() -> Self {
        SubsetHandle(BTreeSet::new())
    }

    pub fn from_ids<I, T>(ids: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<PointId>,
    {
        SubsetHandle(ids.into_iter().map(Into::into).collect())
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = &PointId> + Clone {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.0.contains(id)
    }

    pub fn insert(&mut self, id: impl Into<PointId>) -> bool {
        self.0.insert(id.into())
    }

    pub fn remove(&mut self, id: &PointId) -> bool {
        self.0.remove(id)
    }

    pub fn union(&self, other: &SubsetHandle) -> SubsetHandle {
        SubsetHandle(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &SubsetHandle) -> SubsetHandle {
        SubsetHandle(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &SubsetHandle) -> SubsetHandle {
        SubsetHandle(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &SubsetHandle) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &SubsetHandle) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<PointId> for SubsetHandle {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        SubsetHandle(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SubsetHandle {
    type Item = &'a PointId;
    type IntoIter = alloc::collections::btree_set::Iter<'a, PointId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for SubsetHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

/// How subset quantifiers are evaluated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchMode {
    /// Enumeration up to the exhaustive limit, matroid partition above it.
    Exact,
    /// Enumeration regardless of the limit (up to [`HARD_LIMIT`] points).
    Exhaustive,
    /// Enumeration up to the limit; above it, only violating sets of at most
    /// `violation_bound` points are searched, and success is reported as
    /// [`Sufficiency::Unverified`].
    Bounded,
}

/// Largest universe ever enumerated subset by subset.
pub const HARD_LIMIT: usize = 22;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub exhaustive_limit: usize,
    pub violation_bound: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: SearchMode::Exact,
            exhaustive_limit: 12,
            violation_bound: 6,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sufficiency {
    Holds,
    /// `witness` is a set `A` with `δ(A) < δ(A ∩ Y)`.
    Fails {
        witness: SubsetHandle,
    },
    /// No violation of size at most `searched_up_to` exists; larger ones
    /// were not examined.
    Unverified {
        searched_up_to: usize,
    },
}

impl Sufficiency {
    pub fn holds(&self) -> bool {
        matches!(self, Sufficiency::Holds)
    }
}

/// The self-sufficient closure with the sets adjoined on the way.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosureTrace {
    pub closure: SubsetHandle,
    /// Each entry was adjoined to the current set because it lowered δ.
    /// When the universe is above the exhaustive limit the whole repair is
    /// a single step.
    pub steps: Vec<SubsetHandle>,
}

/// Ranks of every subset of a small universe, with points ordered by id.
struct Table {
    order: Vec<usize>,
    ranks: Vec<u32>,
    black: u32,
    p: i64,
}

impl Table {
    fn delta(&self, mask: u32) -> i64 {
        self.p * self.ranks[mask as usize] as i64 - (mask & self.black).count_ones() as i64
    }

    fn mask_of(&self, idx: &[usize]) -> u32 {
        let mut m = 0;
        for (k, i) in self.order.iter().enumerate() {
            if idx.contains(i) {
                m |= 1 << k;
            }
        }
        m
    }

    fn indices(&self, mask: u32) -> Vec<usize> {
        (0..self.order.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| self.order[k])
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ColoredStructure {
    geom: GeometryKind,
    p: u32,
    points: Vec<GeometryPoint>,
    colors: Vec<Color>,
    index: BTreeMap<PointId, usize>,
    payloads: BTreeMap<Payload, usize>,
    rows: RowStore,
}

impl PartialEq for ColoredStructure {
    fn eq(&self, other: &Self) -> bool {
        self.geom == other.geom
            && self.p == other.p
            && self.points == other.points
            && self.colors == other.colors
    }
}

impl Eq for ColoredStructure {}

impl ColoredStructure {
    pub fn new(geom: GeometryKind, p: u32, points: Vec<(GeometryPoint, Color)>) -> Result<Self> {
        Self::empty(geom, p)?.extend(points)
    }

    pub fn empty(geom: GeometryKind, p: u32) -> Result<Self> {
        geom.validate()?;
        if p < 2 {
            return Err(Error::InvalidP(p));
        }
        Ok(ColoredStructure {
            geom,
            p,
            points: Vec::new(),
            colors: Vec::new(),
            index: BTreeMap::new(),
            payloads: BTreeMap::new(),
            rows: RowStore::build(&geom, core::iter::empty()),
        })
    }

    /// Adds points. For the function field the number of base
    /// transcendentals grows to cover the new payloads.
    pub fn extend(&self, points: Vec<(GeometryPoint, Color)>) -> Result<Self> {
        let mut out = self.clone();
        if let GeometryKind::AlgebraicFunctionField { n } = out.geom {
            let need = points
                .iter()
                .map(|(pt, _)| pt.payload.extent() as u32)
                .max()
                .unwrap_or(0);
            out.geom = GeometryKind::AlgebraicFunctionField { n: n.max(need) };
        }
        for (pt, color) in points {
            out.geom
                .check_payload(&pt.payload)
                .map_err(|reason| Error::PayloadMismatch {
                    id: pt.id.to_string(),
                    geometry: out.geom.to_string(),
                    reason,
                })?;
            if out.index.contains_key(&pt.id) {
                return Err(Error::DuplicateId(pt.id.to_string()));
            }
            if let Some(&other) = out.payloads.get(&pt.payload) {
                return Err(Error::DuplicatePayload(
                    out.points[other].id.to_string(),
                    pt.id.to_string(),
                ));
            }
            let k = out.points.len();
            out.rows.push(&out.geom, &pt.payload);
            out.index.insert(pt.id.clone(), k);
            out.payloads.insert(pt.payload.clone(), k);
            out.points.push(pt);
            out.colors.push(color);
        }
        Ok(out)
    }

    /// The substructure on `a`, keeping the original insertion order.
    pub fn restrict(&self, a: &SubsetHandle) -> Result<Self> {
        let mut idx = self.indices(a)?;
        idx.sort_unstable();
        let points: Vec<GeometryPoint> = idx.iter().map(|&i| self.points[i].clone()).collect();
        Ok(ColoredStructure {
            geom: self.geom,
            p: self.p,
            colors: idx.iter().map(|&i| self.colors[i]).collect(),
            index: points
                .iter()
                .enumerate()
                .map(|(k, pt)| (pt.id.clone(), k))
                .collect(),
            payloads: points
                .iter()
                .enumerate()
                .map(|(k, pt)| (pt.payload.clone(), k))
                .collect(),
            rows: self.rows.select(&idx),
            points,
        })
    }

    pub fn geometry(&self) -> GeometryKind {
        self.geom
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in insertion order.
    pub fn points(&self) -> impl Iterator<Item = (&GeometryPoint, Color)> {
        self.points.iter().zip(self.colors.iter().copied())
    }

    pub fn point(&self, id: &PointId) -> Option<&GeometryPoint> {
        self.index.get(id).map(|&i| &self.points[i])
    }

    pub fn color(&self, id: &PointId) -> Option<Color> {
        self.index.get(id).map(|&i| self.colors[i])
    }

    /// Coordinates used by linear payloads, or the largest variable index.
    pub fn extent(&self) -> usize {
        self.points
            .iter()
            .map(|pt| pt.payload.extent())
            .max()
            .unwrap_or(0)
    }

    /// `rank(A ∪ base ∪ extra) − rank(base ∪ extra)` where `extra` are
    /// payloads that need not be points of the structure.
    pub fn relative_rank_over(
        &self,
        a: &SubsetHandle,
        base: &SubsetHandle,
        extra: &[Payload],
    ) -> Result<usize> {
        let geom = self.wide_geometry(extra);
        for e in extra {
            geom.check_payload(e)
                .map_err(|reason| Error::PayloadMismatch {
                    id: "parameter".into(),
                    geometry: geom.to_string(),
                    reason,
                })?;
        }
        let bi = self.indices(base)?;
        let ai = self.indices(&a.difference(base))?;
        let lower: Vec<&Payload> = bi
            .iter()
            .map(|&i| &self.points[i].payload)
            .chain(extra)
            .collect();
        let upper: Vec<&Payload> = lower
            .iter()
            .copied()
            .chain(ai.iter().map(|&i| &self.points[i].payload))
            .collect();
        Ok(crate::pregeometry::payload_rank(&geom, upper.into_iter())
            - crate::pregeometry::payload_rank(&geom, lower.into_iter()))
    }

    fn wide_geometry(&self, extra: &[Payload]) -> GeometryKind {
        match self.geom {
            GeometryKind::AlgebraicFunctionField { n } => GeometryKind::AlgebraicFunctionField {
                n: extra.iter().map(|e| e.extent() as u32).fold(n, u32::max),
            },
            g => g,
        }
    }

    pub fn contains_id(&self, id: &PointId) -> bool {
        self.index.contains_key(id)
    }

    /// The id of the point carrying `payload`, if any.
    pub fn find_payload(&self, payload: &Payload) -> Option<&PointId> {
        self.payloads.get(payload).map(|&i| &self.points[i].id)
    }

    pub fn all(&self) -> SubsetHandle {
        self.index.keys().cloned().collect()
    }

    pub fn blacks(&self) -> SubsetHandle {
        self.points()
            .filter(|(_, c)| c.is_black())
            .map(|(pt, _)| pt.id.clone())
            .collect()
    }

    pub fn whites(&self) -> SubsetHandle {
        self.points()
            .filter(|(_, c)| !c.is_black())
            .map(|(pt, _)| pt.id.clone())
            .collect()
    }

    /// A handle on the given ids, checking that they exist.
    pub fn handle<I, T>(&self, ids: I) -> Result<SubsetHandle>
    where
        I: IntoIterator<Item = T>,
        T: Into<PointId>,
    {
        let h = SubsetHandle::from_ids(ids);
        self.indices(&h)?;
        Ok(h)
    }

    /// The geometry points of `a`, ordered by id.
    pub fn geometry_points(&self, a: &SubsetHandle) -> Result<Vec<GeometryPoint>> {
        Ok(self
            .indices(a)?
            .into_iter()
            .map(|i| self.points[i].clone())
            .collect())
    }

    pub(crate) fn indices(&self, a: &SubsetHandle) -> Result<Vec<usize>> {
        a.ids()
            .map(|id| {
                self.index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnknownId(id.to_string()))
            })
            .collect()
    }

    pub(crate) fn index_of(&self, id: &PointId) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub(crate) fn color_at(&self, i: usize) -> Color {
        self.colors[i]
    }

    pub(crate) fn rows(&self) -> &RowStore {
        &self.rows
    }

    fn handle_of(&self, idx: impl IntoIterator<Item = usize>) -> SubsetHandle {
        idx.into_iter().map(|i| self.points[i].id.clone()).collect()
    }

    pub(crate) fn rank_idx(&self, idx: &[usize]) -> usize {
        self.rows.rank_of(idx)
    }

    pub(crate) fn delta_idx(&self, idx: &[usize]) -> i64 {
        let blacks = idx.iter().filter(|&&i| self.colors[i].is_black()).count();
        self.p as i64 * self.rank_idx(idx) as i64 - blacks as i64
    }

    pub fn rank(&self, a: &SubsetHandle) -> Result<usize> {
        Ok(self.rank_idx(&self.indices(a)?))
    }

    /// `rank(a ∪ b) − rank(b)`.
    pub fn relative_rank(&self, a: &SubsetHandle, b: &SubsetHandle) -> Result<usize> {
        let ab = self.indices(&a.union(b))?;
        let b = self.indices(b)?;
        Ok(self.rank_idx(&ab) - self.rank_idx(&b))
    }

    pub fn delta(&self, a: &SubsetHandle) -> Result<i64> {
        Ok(self.delta_idx(&self.indices(a)?))
    }

    /// `δ` of every subset, indexed by bitmask over the returned ids (in
    /// insertion order). At most [`HARD_LIMIT`] points.
    pub fn delta_table(&self) -> Result<(Vec<PointId>, Vec<i64>)> {
        if self.len() > HARD_LIMIT {
            return Err(Error::TooLarge {
                what: "structure",
                size: self.len(),
                limit: HARD_LIMIT,
            });
        }
        let idx: Vec<usize> = (0..self.len()).collect();
        let ranks = self.rows.rank_table(&idx);
        let black = idx
            .iter()
            .filter(|&&i| self.colors[i].is_black())
            .fold(0usize, |m, &i| m | 1 << i);
        let p = self.p as i64;
        let table = ranks
            .iter()
            .enumerate()
            .map(|(mask, &r)| p * r as i64 - (mask & black).count_ones() as i64)
            .collect();
        Ok((self.points.iter().map(|pt| pt.id.clone()).collect(), table))
    }

    /// `δ(A/B) = δ(A ∪ B) − δ(B)`.
    pub fn delta_rel(&self, a: &SubsetHandle, b: &SubsetHandle) -> Result<i64> {
        Ok(self.delta(&a.union(b))? - self.delta(b)?)
    }

    /// `min δ(A/C)` over `A∩B ⊆ C ⊆ B`, by enumeration of `C`.
    pub fn delta_rel_inf(&self, a: &SubsetHandle, b: &SubsetHandle) -> Result<i64> {
        let fixed = a.intersection(b);
        let free: Vec<PointId> = b.difference(a).ids().cloned().collect();
        self.indices(a)?;
        self.indices(b)?;
        if free.len() > HARD_LIMIT {
            return Err(Error::TooLarge {
                what: "relative infimum",
                size: free.len(),
                limit: HARD_LIMIT,
            });
        }
        let mut best = i64::MAX;
        for pick in subsets::by_size(free.len()) {
            let mut c = fixed.clone();
            for k in pick {
                c.insert(free[k].clone());
            }
            best = best.min(self.delta_rel(a, &c)?);
        }
        Ok(best)
    }

    fn table(&self, universe: &[usize]) -> Table {
        let mut order = universe.to_vec();
        order.sort_by(|&x, &y| self.points[x].id.cmp(&self.points[y].id));
        let ranks = self.rows.rank_table(&order);
        let black = order
            .iter()
            .enumerate()
            .filter(|(_, &i)| self.colors[i].is_black())
            .fold(0u32, |m, (k, _)| m | (1 << k));
        Table {
            order,
            ranks,
            black,
            p: self.p as i64,
        }
    }

    /// `Y ≤ M`, decided exactly.
    pub fn is_self_sufficient(&self, y: &SubsetHandle) -> Result<bool> {
        self.is_self_sufficient_in(y, &self.all())
    }

    /// `Y ≤ X`, decided exactly.
    pub fn is_self_sufficient_in(&self, y: &SubsetHandle, x: &SubsetHandle) -> Result<bool> {
        Ok(self
            .check_self_sufficient(y, x, &SearchOptions::default())?
            .holds())
    }

    pub fn check_self_sufficient(
        &self,
        y: &SubsetHandle,
        x: &SubsetHandle,
        opts: &SearchOptions,
    ) -> Result<Sufficiency> {
        if !y.is_subset(x) {
            return Err(Error::Precondition(alloc::format!(
                "{y} is not contained in {x}"
            )));
        }
        let xi = self.indices(x)?;
        let yi = self.indices(y)?;
        let enumerate = match opts.mode {
            SearchMode::Exhaustive => {
                if xi.len() > HARD_LIMIT {
                    return Err(Error::TooLarge {
                        what: "universe",
                        size: xi.len(),
                        limit: HARD_LIMIT,
                    });
                }
                true
            }
            _ => xi.len() <= opts.exhaustive_limit.min(HARD_LIMIT),
        };
        if enumerate {
            let t = self.table(&xi);
            let ym = t.mask_of(&yi);
            for a in subsets::masks_by_size(xi.len()) {
                if t.delta(a) < t.delta(a & ym) {
                    return Ok(Sufficiency::Fails {
                        witness: self.handle_of(t.indices(a)),
                    });
                }
            }
            return Ok(Sufficiency::Holds);
        }
        let ground: Vec<usize> = xi
            .iter()
            .copied()
            .filter(|i| !yi.contains(i) && self.colors[*i].is_black())
            .collect();
        if opts.mode == SearchMode::Bounded {
            let mut ground = ground;
            ground.sort_by(|&a, &b| self.points[a].id.cmp(&self.points[b].id));
            let base = self.delta_idx(&yi);
            let bound = opts.violation_bound.min(ground.len());
            for k in 1..=bound {
                for pick in subsets::Combinations::new(ground.len(), k) {
                    let mut idx = yi.clone();
                    idx.extend(pick.iter().map(|&j| ground[j]));
                    if self.delta_idx(&idx) < base {
                        return Ok(Sufficiency::Fails {
                            witness: self.handle_of(idx),
                        });
                    }
                }
            }
            return Ok(Sufficiency::Unverified {
                searched_up_to: bound,
            });
        }
        let min = partition::minimize(&self.rows, &yi, &ground, self.p as usize);
        if min.value < 0 {
            let mut w = yi;
            w.extend(min.minimizer);
            Ok(Sufficiency::Fails {
                witness: self.handle_of(w),
            })
        } else {
            Ok(Sufficiency::Holds)
        }
    }

    /// `∅ ≤ M`: `None` when δ is nonnegative on every subset, otherwise the
    /// smallest set of minimal δ.
    pub fn negative_delta_witness(&self) -> Result<Option<SubsetHandle>> {
        let all: Vec<usize> = (0..self.len()).collect();
        let blacks: Vec<usize> = all
            .iter()
            .copied()
            .filter(|&i| self.colors[i].is_black())
            .collect();
        let min = partition::minimize(&self.rows, &[], &blacks, self.p as usize);
        Ok((min.value < 0).then(|| self.handle_of(min.minimizer)))
    }

    pub fn self_sufficient_closure(&self, s: &SubsetHandle) -> Result<SubsetHandle> {
        Ok(self
            .closure_trace(s, &self.all(), &SearchOptions::default())?
            .closure)
    }

    /// The closure of `S` inside the substructure `X`.
    pub fn closure_in(&self, s: &SubsetHandle, x: &SubsetHandle) -> Result<SubsetHandle> {
        Ok(self.closure_trace(s, x, &SearchOptions::default())?.closure)
    }

    /// Closure by repeated repair. While some `A ⊆ X∖current` lowers δ,
    /// the smallest such `A` (then lexicographically least by ids) is
    /// adjoined. Above the exhaustive limit the closure is computed in one
    /// step as the minimal minimizer of `δ(S ∪ A)`.
    pub fn closure_trace(
        &self,
        s: &SubsetHandle,
        x: &SubsetHandle,
        opts: &SearchOptions,
    ) -> Result<ClosureTrace> {
        if !s.is_subset(x) {
            return Err(Error::Precondition(alloc::format!(
                "{s} is not contained in {x}"
            )));
        }
        let xi = self.indices(x)?;
        let si = self.indices(s)?;
        let enumerate = match opts.mode {
            SearchMode::Exhaustive => xi.len() <= HARD_LIMIT,
            _ => xi.len() <= opts.exhaustive_limit.min(HARD_LIMIT),
        };
        if enumerate {
            let t = self.table(&xi);
            let mut cur = t.mask_of(&si);
            let mut steps = Vec::new();
            'repair: loop {
                let free: Vec<usize> = (0..xi.len()).filter(|k| cur & (1 << k) == 0).collect();
                let here = t.delta(cur);
                for pick in subsets::by_size(free.len()).skip(1) {
                    let a = pick.iter().fold(0u32, |m, &j| m | (1 << free[j]));
                    if t.delta(cur | a) < here {
                        steps.push(self.handle_of(t.indices(a)));
                        cur |= a;
                        continue 'repair;
                    }
                }
                break;
            }
            return Ok(ClosureTrace {
                closure: self.handle_of(t.indices(cur)),
                steps,
            });
        }
        let ground: Vec<usize> = xi
            .iter()
            .copied()
            .filter(|i| !si.contains(i) && self.colors[*i].is_black())
            .collect();
        let min = partition::minimize(&self.rows, &si, &ground, self.p as usize);
        let added = self.handle_of(min.minimizer);
        let steps = if added.is_empty() {
            Vec::new()
        } else {
            alloc::vec![added.clone()]
        };
        Ok(ClosureTrace {
            closure: s.union(&added),
            steps,
        })
    }

    /// One line per point: `id color payload`.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (pt, c) in self.points() {
            out.push_str(&alloc::format!("{} {} {}\n", pt.id, c, pt.payload));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIN: GeometryKind = GeometryKind::LinearRational;

    fn pt(id: &str, v: &[i64], c: Color) -> (GeometryPoint, Color) {
        (GeometryPoint::new(id, Payload::rational_ints(v)), c)
    }

    fn h(ids: &[&str]) -> SubsetHandle {
        SubsetHandle::from_ids(ids.iter().copied())
    }

    fn pair() -> ColoredStructure {
        ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("v", &[1, 0], Color::Black),
                pt("w", &[2, 0], Color::Black)
            ],
        )
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        let m = pair();
        assert_eq!(m.delta(&h(&[])).unwrap(), 0);
        assert_eq!(m.delta(&h(&["v"])).unwrap(), 1);
        assert_eq!(m.delta(&h(&["v", "w"])).unwrap(), 0);
        assert_eq!(m.delta_rel(&h(&["w"]), &h(&["v"])).unwrap(), -1);
        assert_eq!(m.delta_rel(&h(&["v"]), &h(&["v", "w"])).unwrap(), 0);
        let m2 = ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("x", &[1, 0], Color::Black),
                pt("y", &[0, 1], Color::White)
            ],
        )
        .unwrap();
        assert_eq!(m2.delta_rel(&h(&["y"]), &h(&["x"])).unwrap(), 2);
        assert!(matches!(m.delta(&h(&["z"])), Err(Error::UnknownId(_))));
    }

    #[test]
    fn self_sufficiency_examples() {
        let m = pair();
        assert!(m.is_self_sufficient(&m.all()).unwrap());
        assert!(!m.is_self_sufficient(&h(&["v"])).unwrap());
        let m = ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("e1", &[1, 0], Color::Black),
                pt("e2", &[0, 1], Color::Black),
                pt("s", &[1, 1], Color::White),
            ],
        )
        .unwrap();
        assert!(m.is_self_sufficient(&h(&["s"])).unwrap());
    }

    #[test]
    fn closure_examples() {
        let m = pair();
        assert_eq!(
            m.self_sufficient_closure(&h(&["v"])).unwrap(),
            h(&["v", "w"])
        );
        assert_eq!(m.self_sufficient_closure(&h(&[])).unwrap(), h(&[]));
        let t = m
            .closure_trace(&h(&["v"]), &m.all(), &SearchOptions::default())
            .unwrap();
        assert_eq!(t.steps, alloc::vec![h(&["w"])]);
    }

    #[test]
    fn partition_agrees_with_enumeration() {
        let m = ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("a", &[1, 0, 0], Color::Black),
                pt("b", &[0, 1, 0], Color::Black),
                pt("c", &[1, 1, 0], Color::Black),
                pt("d", &[1, 2, 0], Color::Black),
                pt("g", &[2, 1, 0], Color::Black),
                pt("e", &[0, 0, 1], Color::Black),
                pt("f", &[0, 0, 2], Color::White),
            ],
        )
        .unwrap();
        let exact = SearchOptions {
            exhaustive_limit: 0,
            ..SearchOptions::default()
        };
        for s in [h(&[]), h(&["a"]), h(&["e"]), h(&["f"]), h(&["a", "e"])] {
            let by_enum = m
                .closure_trace(&s, &m.all(), &SearchOptions::default())
                .unwrap();
            let by_part = m.closure_trace(&s, &m.all(), &exact).unwrap();
            assert_eq!(by_enum.closure, by_part.closure, "closure of {s}");
            let e = m
                .check_self_sufficient(&s, &m.all(), &SearchOptions::default())
                .unwrap();
            let q = m.check_self_sufficient(&s, &m.all(), &exact).unwrap();
            assert_eq!(e.holds(), q.holds());
        }
        assert_eq!(
            m.negative_delta_witness().unwrap(),
            Some(h(&["a", "b", "c", "d", "g"]))
        );
    }

    #[test]
    fn bounded_mode_reports_unverified() {
        let m = ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("x", &[1, 0], Color::Black),
                pt("y", &[0, 1], Color::Black)
            ],
        )
        .unwrap();
        let opts = SearchOptions {
            mode: SearchMode::Bounded,
            exhaustive_limit: 0,
            violation_bound: 1,
        };
        let v = m.check_self_sufficient(&h(&[]), &m.all(), &opts).unwrap();
        assert_eq!(v, Sufficiency::Unverified { searched_up_to: 1 });
        let v = pair()
            .check_self_sufficient(&h(&["v"]), &pair().all(), &opts)
            .unwrap();
        assert!(matches!(v, Sufficiency::Fails { .. }));
    }

    #[test]
    fn invalid_structures() {
        assert!(matches!(
            ColoredStructure::empty(LIN, 1),
            Err(Error::InvalidP(1))
        ));
        let dup = ColoredStructure::new(
            LIN,
            2,
            alloc::vec![
                pt("x", &[1, 0], Color::Black),
                pt("y", &[1, 0], Color::White)
            ],
        );
        assert!(matches!(dup, Err(Error::DuplicatePayload(..))));
    }
}
