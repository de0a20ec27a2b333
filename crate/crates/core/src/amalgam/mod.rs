//! Amalgamation over self-sufficient embeddings.
//!
//! [`free_amalgam`] places `A∖B` generically over `M`. [`amalgamate`] walks
//! the minimal steps of `B ≤ A`; each black step is first tried as a free
//! amalgam, and when that leaves the class the step is mapped onto a
//! realization already inside the current structure. [`build_rich`]
//! repeats this over a fair schedule of tasks.

mod frame;
mod rich;

pub use rich::{build_rich, BuildLog, Coverage, RichConfig, StepRecord, Task, TaskKind};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use frame::Frame;

use crate::codes::{candidates, Catalogue, Param};
use crate::collapse::{check_membership, extension_verdict, ExtensionVerdict, MuSpec};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::extensions::decompose_minimal;
use crate::pregeometry::{GeometryPoint, Payload, PointId};

/// Largest coordinate index or variable number a re-embedding may allocate.
pub const MAX_EXTENT: usize = 1 << 16;

/// Ids of `A` mapped to ids of the extended structure.
pub type Embedding = BTreeMap<PointId, PointId>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeAmalgam {
    pub structure: ColoredStructure,
    pub embedding: Embedding,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Subcase {
    /// A white point algebraic over the base whose image is already present.
    WhiteInternal,
    /// A white point added to the structure.
    WhiteNew,
    /// A black step added freely.
    Free,
    /// A black step mapped onto an existing realization after the free
    /// amalgam failed the first condition.
    CopyA,
    /// The same after the free amalgam failed the second condition.
    CopyB,
}

impl Subcase {
    pub fn label(self) -> &'static str {
        match self {
            Subcase::WhiteInternal => "1.1",
            Subcase::WhiteNew => "1.2",
            Subcase::Free => "2-free",
            Subcase::CopyA => "2.1",
            Subcase::CopyB => "2.2",
        }
    }

    pub const ALL: [Subcase; 5] = [
        Subcase::WhiteInternal,
        Subcase::WhiteNew,
        Subcase::Free,
        Subcase::CopyA,
        Subcase::CopyB,
    ];
}

impl fmt::Display for Subcase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Free,
    InternalCopy,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Free => "free",
            Mode::InternalCopy => "internal-copy",
        }
    }
}

/// One minimal step of `B ≤ A` and how it was placed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepTrace {
    pub subcase: Subcase,
    /// Ids of `A` added in this step.
    pub new_points: Vec<PointId>,
    /// Their images.
    pub images: Vec<PointId>,
    /// Verdict on the free amalgam, for black steps.
    pub verdict: Option<String>,
    /// Template and parameter responsible for an internal copy.
    pub code: Option<(String, Param)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AmalgamResult {
    pub extended: ColoredStructure,
    pub embedding: Embedding,
    pub mode: Mode,
    pub trace: Vec<StepTrace>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AmalgamOptions {
    pub budget: u64,
    /// Check that `M` and `A` are in the class before starting.
    pub check_inputs: bool,
}

impl Default for AmalgamOptions {
    fn default() -> Self {
        AmalgamOptions {
            budget: crate::codes::DEFAULT_TUPLE_BUDGET,
            check_inputs: true,
        }
    }
}

fn precondition(msg: String) -> Error {
    Error::Precondition(msg)
}

/// Checks that `B` is a common self-sufficient substructure of `M` and `A`
/// and that the remaining ids are disjoint.
fn check_common(m: &ColoredStructure, a: &ColoredStructure, b: &SubsetHandle) -> Result<()> {
    if m.geometry().is_linear() != a.geometry().is_linear()
        || (m.geometry().is_linear() && m.geometry() != a.geometry())
    {
        return Err(precondition(alloc::format!(
            "geometries {} and {} differ",
            m.geometry(),
            a.geometry()
        )));
    }
    if m.p() != a.p() {
        return Err(precondition(alloc::format!(
            "p differs: {} and {}",
            m.p(),
            a.p()
        )));
    }
    for id in b.ids() {
        let (pm, pa) = match (m.point(id), a.point(id)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::UnknownId(id.to_string())),
        };
        if pm.payload != pa.payload || m.color(id) != a.color(id) {
            return Err(precondition(alloc::format!(
                "point `{id}` differs between M and A"
            )));
        }
    }
    for (pt, _) in a.points() {
        if !b.contains(&pt.id) && m.contains_id(&pt.id) {
            return Err(precondition(alloc::format!(
                "id `{}` of A∖B is already used in M",
                pt.id
            )));
        }
    }
    if !m.is_self_sufficient(b)? {
        return Err(Error::NotSelfSufficient(alloc::format!("{b} in M")));
    }
    if !a.is_self_sufficient(b)? {
        return Err(Error::NotSelfSufficient(alloc::format!("{b} in A")));
    }
    Ok(())
}

fn payloads(s: &ColoredStructure, h: &SubsetHandle) -> Result<Vec<Payload>> {
    Ok(s.geometry_points(h)?
        .into_iter()
        .map(|pt| pt.payload)
        .collect())
}

fn capacity(next: usize) -> Result<()> {
    if next > MAX_EXTENT {
        return Err(Error::Capacity(alloc::format!(
            "re-embedding needs {next} generic elements, above {MAX_EXTENT}"
        )));
    }
    Ok(())
}

/// `M ∪ A` with `A∖B` moved into general position over `M` relative to `B`:
/// new directions of a linear geometry go to fresh coordinates beyond `M`,
/// base transcendentals of `A` not occurring in `B` are renamed to fresh
/// ones. A white point of `A` algebraic over `B` whose image already lies in
/// `M` with the same color is identified with it.
pub fn free_amalgam(
    m: &ColoredStructure,
    a: &ColoredStructure,
    b: &SubsetHandle,
) -> Result<FreeAmalgam> {
    check_common(m, a, b)?;
    let geom = m.geometry();
    let mut frame = Frame::identity_on(&geom, &payloads(a, b)?);
    let mut next = m.extent().max(a.extent());
    let mut embedding: Embedding = b.ids().map(|id| (id.clone(), id.clone())).collect();
    let mut added = Vec::new();
    let rest = a.all().difference(b);
    for id in rest.ids() {
        let pt = a.point(id).expect("listed id");
        frame.extend_fresh(&pt.payload, &mut next);
    }
    capacity(next)?;
    for id in rest.ids() {
        let pt = a.point(id).expect("listed id");
        let color = a.color(id).expect("listed id");
        let image = frame.apply(&pt.payload).expect("frame covers A");
        match m.find_payload(&image) {
            Some(other) if m.color(other) == Some(color) => {
                embedding.insert(id.clone(), other.clone());
            }
            Some(other) => {
                return Err(precondition(alloc::format!(
                    "`{id}` would coincide with `{other}` of the other color"
                )))
            }
            None => {
                embedding.insert(id.clone(), id.clone());
                added.push((GeometryPoint::new(id.clone(), image), color));
            }
        }
    }
    let structure = m.extend(added)?;
    let image: SubsetHandle = embedding.values().cloned().collect();
    let expect = m.rank(&m.all())? + a.rank(&a.all())? - a.rank(b)?;
    if structure.rank(&structure.all())? != expect {
        return Err(Error::Capacity(alloc::format!(
            "re-embedding of A over {b} is not independent from M; the function field re-embedding \
             only renames variables that do not occur in B"
        )));
    }
    if !structure.is_self_sufficient(&m.all())? || !structure.is_self_sufficient(&image)? {
        return Err(Error::EmbeddingCheck(
            "free amalgam does not contain M and A self-sufficiently".into(),
        ));
    }
    Ok(FreeAmalgam {
        structure,
        embedding,
    })
}

/// Amalgamates `A` and `M` over `B` inside the class. Both inputs must be in
/// the class and `B` self-sufficient in both.
pub fn amalgamate(
    m: &ColoredStructure,
    a: &ColoredStructure,
    b: &SubsetHandle,
    cat: &Catalogue,
    spec: &MuSpec,
    opts: &AmalgamOptions,
) -> Result<AmalgamResult> {
    check_common(m, a, b)?;
    if opts.check_inputs {
        for (name, s) in [("M", m), ("A", a)] {
            let v = check_membership(s, cat, spec, opts.budget)?;
            if v.is_violation() {
                return Err(precondition(alloc::format!(
                    "{name} is not in the class: {v:?}"
                )));
            }
        }
    }
    let geom = m.geometry();
    let chain = decompose_minimal(b, &a.all(), a)?;
    let mut st = State {
        cur: m.clone(),
        frame: Frame::identity_on(&geom, &payloads(a, b)?),
        embedding: b.ids().map(|id| (id.clone(), id.clone())).collect(),
        next: m.extent().max(a.extent()),
    };
    let mut trace = Vec::new();
    for w in chain.windows(2) {
        trace.push(st.step(a, &w[0], &w[1], cat, spec, opts.budget)?);
    }
    let mode = if trace
        .iter()
        .any(|t| matches!(t.subcase, Subcase::CopyA | Subcase::CopyB))
    {
        Mode::InternalCopy
    } else {
        Mode::Free
    };
    verify_embedding(a, b, &st.cur, &st.embedding)?;
    Ok(AmalgamResult {
        extended: st.cur,
        embedding: st.embedding,
        mode,
        trace,
    })
}

struct State {
    cur: ColoredStructure,
    frame: Frame,
    embedding: Embedding,
    next: usize,
}

impl State {
    fn image_of(&self, h: &SubsetHandle) -> SubsetHandle {
        h.ids().map(|id| self.embedding[id].clone()).collect()
    }

    fn step(
        &mut self,
        a: &ColoredStructure,
        c: &SubsetHandle,
        d: &SubsetHandle,
        cat: &Catalogue,
        spec: &MuSpec,
        budget: u64,
    ) -> Result<StepTrace> {
        self.next = self.next.max(self.cur.extent());
        let new: Vec<PointId> = d.difference(c).ids().cloned().collect();
        let whites: Vec<&PointId> = new
            .iter()
            .filter(|id| a.color(id) == Some(Color::White))
            .collect();
        if let Some(&w) = whites.first() {
            return self.white_step(a, c, d, w);
        }
        let mut frame = self.frame.clone();
        let mut next = self.next;
        for id in &new {
            frame.extend_fresh(&a.point(id).expect("listed id").payload, &mut next);
        }
        capacity(next)?;
        let mut pts = Vec::new();
        for id in &new {
            let image = frame
                .apply(&a.point(id).expect("listed id").payload)
                .expect("frame covers step");
            if let Some(other) = self.cur.find_payload(&image) {
                return Err(Error::Capacity(alloc::format!(
                    "image of `{id}` coincides with `{other}`; the step is not free over the current structure"
                )));
            }
            pts.push((GeometryPoint::new(id.clone(), image), Color::Black));
        }
        let mp = self.cur.extend(pts)?;
        let gained = mp.rank(&mp.all())? - self.cur.rank(&self.cur.all())?;
        if gained != a.relative_rank(d, c)? {
            return Err(Error::Capacity(alloc::format!(
                "free placement of {} is not independent over the current structure",
                d.difference(c)
            )));
        }
        let verdict = extension_verdict(&mp, &self.cur.all(), cat, spec, budget, false)?;
        let label = Some(verdict.to_string());
        match verdict {
            ExtensionVerdict::InClass | ExtensionVerdict::NewWhitePoint => {
                self.cur = mp;
                self.frame = frame;
                self.next = next;
                for id in &new {
                    self.embedding.insert(id.clone(), id.clone());
                }
                Ok(StepTrace {
                    subcase: Subcase::Free,
                    images: new.clone(),
                    new_points: new,
                    verdict: label,
                    code: None,
                })
            }
            ExtensionVerdict::FailsA {
                template,
                parameter,
                realization,
                ..
            } => self.copy(
                a,
                c,
                d,
                &new,
                cat,
                &template,
                parameter,
                realization,
                Subcase::CopyA,
                label,
                budget,
            ),
            ExtensionVerdict::FailsB {
                template,
                parameter,
                sequence,
                ..
            } => {
                let inside = sequence
                    .iter()
                    .find(|t| t.iter().all(|id| new.contains(id)))
                    .cloned()
                    .ok_or_else(|| {
                        Error::InternalCopyNotFound(alloc::format!(
                            "no tuple of {template} lies in the new points"
                        ))
                    })?;
                self.copy(
                    a,
                    c,
                    d,
                    &new,
                    cat,
                    &template,
                    parameter,
                    inside,
                    Subcase::CopyB,
                    label,
                    budget,
                )
            }
            ExtensionVerdict::NotRefuted { .. } => Err(Error::BudgetExceeded(budget)),
        }
    }

    fn white_step(
        &mut self,
        a: &ColoredStructure,
        c: &SubsetHandle,
        d: &SubsetHandle,
        w: &PointId,
    ) -> Result<StepTrace> {
        let payload = &a.point(w).expect("listed id").payload;
        let algebraic = a.relative_rank(d, c)? == 0;
        let mut frame = self.frame.clone();
        let mut next = self.next;
        if !algebraic {
            frame.extend_fresh(payload, &mut next);
            capacity(next)?;
        }
        let image = frame.apply(payload).ok_or_else(|| {
            Error::EmbeddingCheck(alloc::format!("white point `{w}` cannot be transported"))
        })?;
        let (subcase, target) = match self.cur.find_payload(&image) {
            Some(other) if algebraic => {
                if self.cur.color(other) != Some(Color::White) {
                    return Err(precondition(alloc::format!(
                        "`{other}` realizes the type of white `{w}` but is black; B is not self-sufficient in M"
                    )));
                }
                (Subcase::WhiteInternal, other.clone())
            }
            Some(other) => {
                return Err(Error::Capacity(alloc::format!(
                    "fresh image of `{w}` coincides with `{other}`"
                )))
            }
            None => {
                self.cur = self.cur.extend(alloc::vec![(
                    GeometryPoint::new(w.clone(), image),
                    Color::White
                )])?;
                (Subcase::WhiteNew, w.clone())
            }
        };
        self.frame = frame;
        self.next = next;
        self.embedding.insert(w.clone(), target.clone());
        Ok(StepTrace {
            subcase,
            new_points: alloc::vec![w.clone()],
            images: alloc::vec![target],
            verdict: None,
            code: None,
        })
    }

    /// Maps the step `c ≤ d` onto a realization of `template` over
    /// `parameter` inside the current structure. `realization` lists the new
    /// points as they realize the template.
    #[allow(clippy::too_many_arguments)]
    fn copy(
        &mut self,
        a: &ColoredStructure,
        c: &SubsetHandle,
        d: &SubsetHandle,
        new: &[PointId],
        cat: &Catalogue,
        template: &str,
        parameter: Param,
        realization: Vec<PointId>,
        subcase: Subcase,
        verdict: Option<String>,
        budget: u64,
    ) -> Result<StepTrace> {
        let t = cat
            .get(template)
            .ok_or_else(|| Error::UnknownTemplate(template.into()))?;
        let mut sorted = realization.clone();
        sorted.sort();
        if sorted != new {
            return Err(Error::InternalCopyNotFound(alloc::format!(
                "realization of {template} does not enumerate the new points of the step"
            )));
        }
        let base = self.image_of(c);
        let (cands, _) = candidates(t.as_ref(), &parameter, &self.cur, budget)?;
        let want = a.rank(d)?;
        let mut tried = 0usize;
        for cand in cands {
            if cand.iter().any(|id| base.contains(id)) {
                continue;
            }
            tried += 1;
            let mut frame = self.frame.clone();
            let pairs: Vec<(&Payload, &Payload)> = realization
                .iter()
                .zip(&cand)
                .map(|(x, y)| {
                    (
                        &a.point(x).expect("listed id").payload,
                        &self.cur.point(y).expect("candidate id").payload,
                    )
                })
                .collect();
            for (x, y) in &pairs {
                frame.extend_to(x, y);
            }
            if pairs
                .iter()
                .any(|(x, y)| frame.apply(x).as_ref() != Some(*y))
            {
                continue;
            }
            let mut target = base.clone();
            for id in &cand {
                target.insert(id.clone());
            }
            if self.cur.rank(&target)? != want || !self.cur.is_self_sufficient(&target)? {
                continue;
            }
            self.frame = frame;
            let mut images = Vec::new();
            for id in new {
                let k = realization
                    .iter()
                    .position(|x| x == id)
                    .expect("realization enumerates step");
                self.embedding.insert(id.clone(), cand[k].clone());
                images.push(cand[k].clone());
            }
            return Ok(StepTrace {
                subcase,
                new_points: new.to_vec(),
                images,
                verdict,
                code: Some((template.into(), parameter)),
            });
        }
        Err(Error::InternalCopyNotFound(alloc::format!(
            "{tried} candidate realizations of {template} over the parameter, none gives a self-sufficient copy of {d} over {c}"
        )))
    }
}

/// The embedding fixes `B`, preserves colors and ranks, and its image is
/// self-sufficient in `ext`.
fn verify_embedding(
    a: &ColoredStructure,
    b: &SubsetHandle,
    ext: &ColoredStructure,
    emb: &Embedding,
) -> Result<()> {
    for id in b.ids() {
        if emb.get(id) != Some(id) {
            return Err(Error::EmbeddingCheck(alloc::format!(
                "`{id}` of B is moved"
            )));
        }
    }
    let ids: Vec<PointId> = a.all().ids().cloned().collect();
    let mut image = SubsetHandle::new();
    for id in &ids {
        let t = emb
            .get(id)
            .ok_or_else(|| Error::EmbeddingCheck(alloc::format!("`{id}` is not mapped")))?;
        if a.color(id) != ext.color(t) {
            return Err(Error::EmbeddingCheck(alloc::format!(
                "`{id}` ↦ `{t}` changes color"
            )));
        }
        if !image.insert(t.clone()) {
            return Err(Error::EmbeddingCheck(alloc::format!("`{t}` is hit twice")));
        }
    }
    if ids.len() <= 12 {
        let ai = a.indices(&a.all())?;
        let ti: Vec<usize> = ids
            .iter()
            .map(|id| ext.index_of(&emb[id]))
            .collect::<Result<_>>()?;
        let order: Vec<usize> = ids.iter().map(|id| a.index_of(id)).collect::<Result<_>>()?;
        debug_assert_eq!(ai.len(), order.len());
        if a.rows().rank_table(&order) != ext.rows().rank_table(&ti) {
            return Err(Error::EmbeddingCheck("ranks are not preserved".into()));
        }
    } else if a.rank(&a.all())? != ext.rank(&image)? {
        return Err(Error::EmbeddingCheck("ranks are not preserved".into()));
    }
    if !ext.is_self_sufficient(&image)? {
        return Err(Error::EmbeddingCheck(alloc::format!(
            "image {image} is not self-sufficient"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
