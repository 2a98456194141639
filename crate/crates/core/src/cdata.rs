//! Structured data over a finite poset: a stalk for each point and a
//! restriction map toward larger points, strictly functorial.
//!
//! Points of the shape are the points of a T0 space whose opens are the
//! up-sets, so the minimal open around x is its up-set and restrictions
//! run from the stalk at x into the stalks over U_x. Morphisms carry a
//! monotone base map together with one comorphism per source point,
//! pulling the target stalk back along the base.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::kernel::{
    lim_induce, tuple_name, Kernel, KernelError, KernelLimits, KernelPushouts, Limit, Pushout,
};
use crate::poset::{self, bits, complete_over_poset, MonotoneMap, Poset, PosetError};

pub struct CData<K: Kernel> {
    shape: Poset,
    stalks: Vec<K::Obj>,
    res: BTreeMap<(usize, usize), K::Mor>,
}

impl<K: Kernel> Clone for CData<K> {
    fn clone(&self) -> Self {
        CData { shape: self.shape.clone(), stalks: self.stalks.clone(), res: self.res.clone() }
    }
}

impl<K: Kernel> PartialEq for CData<K> {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.stalks == other.stalks && self.res == other.res
    }
}
impl<K: Kernel> Eq for CData<K> {}

impl<K: Kernel> core::fmt::Debug for CData<K> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CData")
            .field("shape", &self.shape)
            .field("stalks", &self.stalks)
            .finish_non_exhaustive()
    }
}

impl<K: Kernel> CData<K> {
    /// Builds data from restrictions given on at least the cover pairs;
    /// composites are filled in and every factorization is checked to
    /// commute strictly.
    pub fn new(
        shape: Poset,
        stalks: Vec<K::Obj>,
        given: BTreeMap<(usize, usize), K::Mor>,
    ) -> Result<CData<K>, KernelError> {
        if stalks.len() != shape.len() {
            return Err(KernelError::Structural("one stalk per shape point is required".into()));
        }
        for (&(x, y), m) in &given {
            if x >= shape.len() || y >= shape.len() || !shape.leq(x, y) {
                return Err(KernelError::Structural(format!(
                    "restriction key ({x},{y}) is not a related pair"
                )));
            }
            if K::src(m) != stalks[x] || K::dst(m) != stalks[y] {
                return Err(KernelError::Structural(format!(
                    "restriction ({x},{y}) does not match its stalks"
                )));
            }
        }
        let res = complete_over_poset(
            &shape,
            &given,
            |i| K::identity(&stalks[i]),
            |outer, inner| {
                K::compose(inner, outer)
                    .map_err(|e| PosetError::NonFunctorialTransitions(format!("{e}")))
            },
        )?;
        Ok(CData { shape, stalks, res })
    }

    /// Data on a single point.
    pub fn single(id: &str, stalk: K::Obj) -> CData<K> {
        let shape = Poset::point(id);
        let mut res = BTreeMap::new();
        res.insert((0, 0), K::identity(&stalk));
        CData { shape, stalks: vec![stalk], res }
    }

    pub fn shape(&self) -> &Poset {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    pub fn stalk(&self, x: usize) -> &K::Obj {
        &self.stalks[x]
    }

    pub fn stalks(&self) -> &[K::Obj] {
        &self.stalks
    }

    /// The restriction for x <= y.
    pub fn res(&self, x: usize, y: usize) -> &K::Mor {
        self.res.get(&(x, y)).expect("restriction for a related pair")
    }

    /// The same data with points renamed; `new_ids[x]` replaces the id of
    /// point x. The relation, stalks and restrictions are carried across
    /// the resulting re-sort.
    pub fn relabel(&self, new_ids: &[String]) -> Result<CData<K>, KernelError> {
        if new_ids.len() != self.len() {
            return Err(KernelError::Structural("one id per point is required".into()));
        }
        let shape = Poset::from_relation(new_ids, |a, b| {
            let ia = new_ids.iter().position(|s| s == a).expect("id of a point");
            let ib = new_ids.iter().position(|s| s == b).expect("id of a point");
            self.shape.leq(ia, ib)
        })?;
        // old index -> new index
        let perm: Vec<usize> = (0..self.len())
            .map(|x| shape.index(&new_ids[x]).expect("relabeled point"))
            .collect();
        let mut stalks = vec![None; self.len()];
        for x in 0..self.len() {
            stalks[perm[x]] = Some(self.stalks[x].clone());
        }
        let mut given = BTreeMap::new();
        for (&(x, y), m) in &self.res {
            given.insert((perm[x], perm[y]), m.clone());
        }
        CData::new(
            shape,
            stalks.into_iter().map(|s| s.expect("every slot filled")).collect(),
            given,
        )
    }

    /// The data induced on an up-closed set of points, together with the
    /// global index of each local point.
    pub fn restrict_to_up_set(&self, mask: u64) -> Result<(CData<K>, Vec<usize>), KernelError> {
        if !self.shape.is_up_closed(mask) {
            return Err(KernelError::Poset(PosetError::NotUpClosed(format!(
                "mask {mask:#x} is not an up-set"
            ))));
        }
        let points = bits(mask);
        let local: BTreeMap<usize, usize> =
            points.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let shape = self.shape.restrict(mask);
        let stalks: Vec<K::Obj> = points.iter().map(|&g| self.stalks[g].clone()).collect();
        let mut given = BTreeMap::new();
        for (&(x, y), m) in &self.res {
            if let (Some(&lx), Some(&ly)) = (local.get(&x), local.get(&y)) {
                given.insert((lx, ly), m.clone());
            }
        }
        let data = CData::new(shape, stalks, given)?;
        Ok((data, points))
    }

    /// Sections over an up-closed set of points: the limit of the stalks
    /// along the restrictions inside the region.
    pub fn sections_on(&self, mask: u64, caps: &Caps) -> Result<SectionData<K>, KernelError>
    where
        K: KernelLimits,
    {
        if !self.shape.is_up_closed(mask) {
            return Err(KernelError::Poset(PosetError::NotUpClosed(format!(
                "mask {mask:#x} is not an up-set"
            ))));
        }
        let points = bits(mask);
        let local: BTreeMap<usize, usize> =
            points.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let objects: Vec<K::Obj> = points.iter().map(|&g| self.stalks[g].clone()).collect();
        let mut arrows = Vec::new();
        for (&(x, y), m) in &self.res {
            if x != y {
                if let (Some(&lx), Some(&ly)) = (local.get(&x), local.get(&y)) {
                    arrows.push((lx, ly, m.clone()));
                }
            }
        }
        let limit = K::limit(&objects, &arrows, caps)?;
        Ok(SectionData { points, limit })
    }
}

/// Sections over a region: `limit.legs[i]` evaluates a section at the
/// point with global index `points[i]`.
pub struct SectionData<K: Kernel> {
    pub points: Vec<usize>,
    pub limit: Limit<K>,
}

impl<K: Kernel> core::fmt::Debug for SectionData<K> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SectionData")
            .field("points", &self.points)
            .field("obj", &self.limit.obj)
            .finish_non_exhaustive()
    }
}

pub struct CDataMorphism<K: Kernel> {
    source: CData<K>,
    target: CData<K>,
    base: MonotoneMap,
    /// co[x]: target stalk at base(x) -> source stalk at x.
    co: Vec<K::Mor>,
}

impl<K: Kernel> Clone for CDataMorphism<K> {
    fn clone(&self) -> Self {
        CDataMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            base: self.base.clone(),
            co: self.co.clone(),
        }
    }
}

impl<K: Kernel> PartialEq for CDataMorphism<K> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.base == other.base
            && self.co == other.co
    }
}
impl<K: Kernel> Eq for CDataMorphism<K> {}

impl<K: Kernel> core::fmt::Debug for CDataMorphism<K> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CDataMorphism")
            .field("base", &self.base)
            .field("co", &self.co)
            .finish_non_exhaustive()
    }
}

impl<K: Kernel> CDataMorphism<K> {
    pub fn new(
        source: &CData<K>,
        target: &CData<K>,
        base: MonotoneMap,
        co: Vec<K::Mor>,
    ) -> Result<CDataMorphism<K>, KernelError> {
        if base.source() != source.shape() || base.target() != target.shape() {
            return Err(KernelError::Structural("base map does not match the shapes".into()));
        }
        if co.len() != source.len() {
            return Err(KernelError::Structural("one comorphism per source point is required".into()));
        }
        for x in 0..source.len() {
            if K::src(&co[x]) != *target.stalk(base.apply(x)) || K::dst(&co[x]) != *source.stalk(x) {
                return Err(KernelError::Structural(format!(
                    "comorphism at point {} has the wrong endpoints",
                    source.shape().id(x)
                )));
            }
        }
        // Strict naturality: restricting after pulling back equals pulling
        // back after restricting.
        for (a, b) in source.shape().related_pairs() {
            if a == b {
                continue;
            }
            let via_source = K::compose(source.res(a, b), &co[a])?;
            let via_target = K::compose(&co[b], target.res(base.apply(a), base.apply(b)))?;
            if via_source != via_target {
                return Err(KernelError::Structural(format!(
                    "comorphisms are not natural across {} <= {}",
                    source.shape().id(a),
                    source.shape().id(b)
                )));
            }
        }
        Ok(CDataMorphism { source: source.clone(), target: target.clone(), base, co })
    }

    pub fn identity(data: &CData<K>) -> CDataMorphism<K> {
        CDataMorphism {
            source: data.clone(),
            target: data.clone(),
            base: MonotoneMap::identity(data.shape()),
            co: (0..data.len()).map(|x| K::identity(data.stalk(x))).collect(),
        }
    }

    pub fn source(&self) -> &CData<K> {
        &self.source
    }

    pub fn target(&self) -> &CData<K> {
        &self.target
    }

    pub fn base(&self) -> &MonotoneMap {
        &self.base
    }

    pub fn co(&self, x: usize) -> &K::Mor {
        &self.co[x]
    }

    /// self after first.
    pub fn compose(&self, first: &CDataMorphism<K>) -> Result<CDataMorphism<K>, KernelError> {
        if first.target != self.source {
            return Err(KernelError::Structural("morphisms do not compose".into()));
        }
        let base = self.base.compose(&first.base)?;
        let mut co = Vec::with_capacity(first.source.len());
        for x in 0..first.source.len() {
            co.push(K::compose(&first.co[x], &self.co[first.base.apply(x)])?);
        }
        CDataMorphism::new(&first.source, &self.target, base, co)
    }

    /// The canonical map from the data on an up-set with a minimum point
    /// down to the single-point data at that minimum.
    pub fn collapse_to_minimum(data: &CData<K>) -> Result<CDataMorphism<K>, KernelError> {
        let m = data
            .shape()
            .minimum()
            .ok_or_else(|| KernelError::Structural("shape has no minimum point".into()))?;
        let point = CData::single(data.shape().id(m), data.stalk(m).clone());
        let base = MonotoneMap::new(
            data.shape().clone(),
            point.shape().clone(),
            vec![0; data.len()],
        )?;
        let co = (0..data.len()).map(|x| data.res(m, x).clone()).collect();
        CDataMorphism::new(data, &point, base, co)
    }
}

/// The two-cell order on parallel morphisms: f <= g when the base maps
/// compare pointwise and each comorphism of f is the comorphism of g
/// corrected by the target restriction along base(f) <= base(g), on the
/// nose.
pub fn two_cell_leq<K: Kernel>(
    f: &CDataMorphism<K>,
    g: &CDataMorphism<K>,
) -> Result<bool, KernelError> {
    if f.source != g.source || f.target != g.target {
        return Err(KernelError::Structural("two-cell comparison needs parallel morphisms".into()));
    }
    if !f.base.pointwise_leq(&g.base)? {
        return Ok(false);
    }
    for x in 0..f.source.len() {
        let corrected = K::compose(&g.co[x], f.target.res(f.base.apply(x), g.base.apply(x)))?;
        if corrected != f.co[x] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All morphisms between two data objects together with the two-cell
/// order, enumerated deterministically (bases in lexicographic order,
/// then comorphism choices in lexicographic order).
pub struct HomPoset<K: Kernel> {
    pub morphisms: Vec<CDataMorphism<K>>,
    /// leq[i][j] iff morphisms[i] <= morphisms[j].
    pub leq: Vec<Vec<bool>>,
}

pub fn hom_poset<K: Kernel>(
    source: &CData<K>,
    target: &CData<K>,
    caps: &Caps,
) -> Result<HomPoset<K>, KernelError> {
    let bases = poset::monotone_maps(source.shape(), target.shape(), caps)?;
    let n = source.len();
    let mut morphisms = Vec::new();
    for base in bases {
        let cands: Vec<Vec<K::Mor>> = (0..n)
            .map(|x| K::hom(target.stalk(base.apply(x)), source.stalk(x), caps))
            .collect::<Result<_, _>>()?;
        let total: u128 = cands.iter().map(|c| c.len() as u128).product();
        if total > caps.hom_budget as u128 {
            return Err(KernelError::SizeCapExceeded {
                what: "comorphism assignments",
                size: total.min(usize::MAX as u128) as usize,
                cap: caps.hom_budget,
            });
        }
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        let consistent = |co: &[K::Mor], x: usize| -> Result<bool, KernelError> {
            for y in 0..=x {
                let (a, b) = if source.shape().leq(y, x) {
                    (y, x)
                } else if source.shape().leq(x, y) {
                    (x, y)
                } else {
                    continue;
                };
                let via_source = K::compose(source.res(a, b), &co[a])?;
                let via_target =
                    K::compose(&co[b], target.res(base.apply(a), base.apply(b)))?;
                if via_source != via_target {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        if n == 0 {
            morphisms.push(CDataMorphism::new(source, target, base.clone(), Vec::new())?);
            continue;
        }
        let mut pick: Vec<usize> = vec![0];
        let mut co: Vec<K::Mor> = Vec::new();
        loop {
            let depth = co.len();
            let i = pick[depth];
            if i >= cands[depth].len() {
                pick.pop();
                if co.pop().is_none() {
                    break;
                }
                *pick.last_mut().expect("one pick per assigned point") += 1;
                continue;
            }
            co.push(cands[depth][i].clone());
            if !consistent(&co, depth)? {
                co.pop();
                pick[depth] += 1;
            } else if co.len() == n {
                morphisms.push(CDataMorphism::new(source, target, base.clone(), co.clone())?);
                co.pop();
                pick[depth] += 1;
            } else {
                pick.push(0);
            }
        }
    }
    let mut leq = vec![vec![false; morphisms.len()]; morphisms.len()];
    for i in 0..morphisms.len() {
        for j in 0..morphisms.len() {
            leq[i][j] = two_cell_leq(&morphisms[i], &morphisms[j])?;
        }
    }
    Ok(HomPoset { morphisms, leq })
}

/// Fibered product of `left: P -> B` and `right: Q -> B`. The shape is the
/// pair poset over matching base points and each stalk is the pushout of
/// the two comorphisms over the stalk downstairs.
pub struct FiberedProduct<K: KernelPushouts> {
    pub object: CData<K>,
    pub to_left: CDataMorphism<K>,
    pub to_right: CDataMorphism<K>,
    pairs: Vec<(usize, usize)>,
    pushouts: Vec<Pushout<K>>,
    left: CDataMorphism<K>,
    right: CDataMorphism<K>,
}

pub fn fibered_product<K: KernelPushouts>(
    left: &CDataMorphism<K>,
    right: &CDataMorphism<K>,
    caps: &Caps,
) -> Result<FiberedProduct<K>, KernelError> {
    if left.target != right.target {
        return Err(KernelError::Structural("fibered product needs a shared target".into()));
    }
    let p = left.source.shape();
    let q = right.source.shape();
    let mut by_id: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for a in 0..p.len() {
        for b in 0..q.len() {
            if left.base.apply(a) == right.base.apply(b) {
                let id = tuple_name(&[p.id(a).to_string(), q.id(b).to_string()]);
                by_id.insert(id, (a, b));
            }
        }
    }
    let ids: Vec<&String> = by_id.keys().collect();
    let shape = Poset::from_relation(&ids, |x, y| {
        let (ax, bx) = by_id[x];
        let (ay, by) = by_id[y];
        p.leq(ax, ay) && q.leq(bx, by)
    })?;
    let pairs: Vec<(usize, usize)> =
        shape.ids().iter().map(|id| by_id[id]).collect();
    let mut stalks = Vec::with_capacity(pairs.len());
    let mut pushouts = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let po = K::pushout(&left.co[a], &right.co[b], caps)?;
        stalks.push(po.obj.clone());
        pushouts.push(po);
    }
    let mut given = BTreeMap::new();
    for (x, y) in shape.covers() {
        let (ax, bx) = pairs[x];
        let (ay, by) = pairs[y];
        let on_left = K::compose(&pushouts[y].left, left.source.res(ax, ay))?;
        let on_right = K::compose(&pushouts[y].right, right.source.res(bx, by))?;
        let step = K::po_induce(&pushouts[x], &on_left, &on_right)?;
        given.insert((x, y), step);
    }
    let object = CData::new(shape.clone(), stalks, given)?;
    let base_left = MonotoneMap::new(
        shape.clone(),
        p.clone(),
        pairs.iter().map(|&(a, _)| a).collect(),
    )?;
    let base_right = MonotoneMap::new(
        shape.clone(),
        q.clone(),
        pairs.iter().map(|&(_, b)| b).collect(),
    )?;
    let to_left = CDataMorphism::new(
        &object,
        &left.source,
        base_left,
        pushouts.iter().map(|po| po.left.clone()).collect(),
    )?;
    let to_right = CDataMorphism::new(
        &object,
        &right.source,
        base_right,
        pushouts.iter().map(|po| po.right.clone()).collect(),
    )?;
    Ok(FiberedProduct {
        object,
        to_left,
        to_right,
        pairs,
        pushouts,
        left: left.clone(),
        right: right.clone(),
    })
}

impl<K: KernelPushouts> FiberedProduct<K> {
    /// The point of the product shape lying over a pair of chart points.
    pub fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (a, b))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pushout(&self, k: usize) -> &Pushout<K> {
        &self.pushouts[k]
    }

    /// The universal pairing of a commuting cone into the product.
    pub fn pair(
        &self,
        w_left: &CDataMorphism<K>,
        w_right: &CDataMorphism<K>,
    ) -> Result<CDataMorphism<K>, KernelError> {
        if w_left.source != w_right.source {
            return Err(KernelError::Structural("cone legs have different sources".into()));
        }
        if w_left.target != self.left.source || w_right.target != self.right.source {
            return Err(KernelError::Structural("cone legs do not match the span".into()));
        }
        if self.left.compose(w_left)? != self.right.compose(w_right)? {
            return Err(KernelError::Structural("cone does not commute over the base".into()));
        }
        let t = &w_left.source;
        let mut base_map = Vec::with_capacity(t.len());
        let mut co = Vec::with_capacity(t.len());
        for x in 0..t.len() {
            let pair = (w_left.base.apply(x), w_right.base.apply(x));
            let k = self
                .pairs
                .iter()
                .position(|&p| p == pair)
                .ok_or_else(|| KernelError::Structural("cone misses the pair poset".into()))?;
            base_map.push(k);
            co.push(K::po_induce(&self.pushouts[k], &w_left.co[x], &w_right.co[x])?);
        }
        let base = MonotoneMap::new(t.shape().clone(), self.object.shape().clone(), base_map)?;
        CDataMorphism::new(t, &self.object, base, co)
    }
}

/// A plain poset viewed as data: one-element set stalks everywhere, so
/// morphisms reduce to monotone base maps and the two-cell order is the
/// pointwise one.
pub fn unit_stalks(shape: &Poset) -> CData<crate::kernel::FinSetKernel> {
    let one = crate::kernel::SetMap::new(1, 1, vec![0]).expect("map between singletons");
    let given: BTreeMap<(usize, usize), crate::kernel::SetMap> =
        shape.covers().into_iter().map(|(x, y)| ((x, y), one.clone())).collect();
    CData::new(shape.clone(), vec![1usize; shape.len()], given)
        .expect("unit stalks are functorial")
}

/// The universal map from a cone into sections, phrased on data: sections
/// over the full shape receive a map from any stalkwise-compatible cone.
pub fn sections_induce<K: KernelLimits>(
    sections: &SectionData<K>,
    cone_obj: &K::Obj,
    cone_legs: &[K::Mor],
) -> Result<K::Mor, KernelError> {
    lim_induce(&sections.limit, cone_obj, cone_legs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{FinPosKernel, FinSetKernel, RingKernel, SetMap};
    use crate::poset::circle_model;
    use crate::ring::{quotient, zn, RingHom};

    fn constant_circle_ring() -> CData<RingKernel> {
        let p = circle_model();
        let r = zn(2);
        let mut given = BTreeMap::new();
        for (x, y) in p.covers() {
            given.insert((x, y), RingHom::identity(&r));
        }
        CData::new(p, vec![r.clone(), r.clone(), r.clone(), r], given).unwrap()
    }

    #[test]
    fn completion_fills_composites_from_covers() {
        let chain = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let a = chain.index("a").unwrap();
        let c = chain.index("c").unwrap();
        let r = zn(4);
        let mut given = BTreeMap::new();
        for (x, y) in chain.covers() {
            given.insert((x, y), RingHom::identity(&r));
        }
        let data: CData<RingKernel> =
            CData::new(chain, vec![r.clone(), r.clone(), r.clone()], given).unwrap();
        assert_eq!(*data.res(a, c), RingHom::identity(&r));
    }

    #[test]
    fn non_functorial_restrictions_are_rejected() {
        // Two routes through a diamond that disagree.
        let diamond = Poset::new(
            &["bot", "l", "r", "top"],
            &[("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
        )
        .unwrap();
        let two = 2usize;
        let id = SetMap::new(2, 2, vec![0, 1]).unwrap();
        let swap = SetMap::new(2, 2, vec![1, 0]).unwrap();
        let b = diamond.index("bot").unwrap();
        let l = diamond.index("l").unwrap();
        let r = diamond.index("r").unwrap();
        let t = diamond.index("top").unwrap();
        let mut given = BTreeMap::new();
        given.insert((b, l), id.clone());
        given.insert((b, r), id.clone());
        given.insert((l, t), id.clone());
        given.insert((r, t), swap);
        let err = CData::<FinSetKernel>::new(diamond, vec![two; 4], given).unwrap_err();
        assert!(matches!(err, KernelError::Poset(PosetError::NonFunctorialTransitions(_))));
    }

    #[test]
    fn sections_of_constant_data_count_components() {
        let data = constant_circle_ring();
        let all = (1u64 << data.len()) - 1;
        let sections = data.sections_on(all, &Caps::default()).unwrap();
        // The shape is connected, so a section is one ring element.
        assert_eq!(sections.limit.tuples.len(), 2);
    }

    #[test]
    fn sections_on_a_minimal_open() {
        let data = constant_circle_ring();
        let a = data.shape().index("a").unwrap();
        let sections = data.sections_on(data.shape().up_set(a), &Caps::default()).unwrap();
        assert_eq!(sections.points.len(), 3);
        assert_eq!(sections.limit.tuples.len(), 2);
    }

    #[test]
    fn sections_reject_regions_that_are_not_up_closed() {
        let data = constant_circle_ring();
        let a = data.shape().index("a").unwrap();
        let err = data.sections_on(1u64 << a, &Caps::default()).unwrap_err();
        assert!(matches!(err, KernelError::Poset(PosetError::NotUpClosed(_))));
    }

    #[test]
    fn restriction_to_an_up_set_keeps_global_indices() {
        let data = constant_circle_ring();
        let a = data.shape().index("a").unwrap();
        let (sub, points) = data.restrict_to_up_set(data.shape().up_set(a)).unwrap();
        assert_eq!(sub.len(), 3);
        assert_eq!(points.len(), 3);
        assert!(points.contains(&a));
        assert!(sub.shape().minimum().is_some());
    }

    #[test]
    fn collapse_to_minimum_is_a_verified_morphism() {
        let data = constant_circle_ring();
        let a = data.shape().index("a").unwrap();
        let (sub, _) = data.restrict_to_up_set(data.shape().up_set(a)).unwrap();
        let down = CDataMorphism::collapse_to_minimum(&sub).unwrap();
        assert_eq!(down.target().len(), 1);
        assert_eq!(down.source().len(), 3);
    }

    #[test]
    fn identity_and_composition_agree() {
        let data = constant_circle_ring();
        let id = CDataMorphism::identity(&data);
        let again = id.compose(&id).unwrap();
        assert_eq!(again, id);
    }

    #[test]
    fn naturality_is_enforced() {
        // Constant set data over a chain, with one comorphism twisted.
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let id = SetMap::new(2, 2, vec![0, 1]).unwrap();
        let swap = SetMap::new(2, 2, vec![1, 0]).unwrap();
        let mut given = BTreeMap::new();
        for (x, y) in chain.covers() {
            given.insert((x, y), id.clone());
        }
        let data: CData<FinSetKernel> = CData::new(chain.clone(), vec![2, 2], given).unwrap();
        let base = MonotoneMap::identity(&chain);
        let err =
            CDataMorphism::new(&data, &data, base, vec![id.clone(), swap]).unwrap_err();
        assert!(matches!(err, KernelError::Structural(_)));
    }

    #[test]
    fn two_cell_order_over_a_point_is_discrete() {
        // Over a single point the correction is an identity, so distinct
        // comorphisms stay incomparable under the strict reading.
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let data: CData<FinPosKernel> = CData::single("*", chain);
        let hp = hom_poset(&data, &data, &Caps::default()).unwrap();
        assert_eq!(hp.morphisms.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(hp.leq[i][j], i == j);
            }
        }
    }

    #[test]
    fn two_cell_order_across_a_twisted_chain() {
        // Target: 2-point stalks over a chain, restriction is the swap.
        // A morphism from a point picks a base point and a comorphism;
        // lo-based f sits under hi-based g exactly when f's comorphism is
        // g's twisted by the swap.
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = chain.index("lo").unwrap();
        let swap = SetMap::new(2, 2, vec![1, 0]).unwrap();
        let mut given = BTreeMap::new();
        given.insert((lo, chain.index("hi").unwrap()), swap);
        let target: CData<FinSetKernel> = CData::new(chain, vec![2, 2], given).unwrap();
        let source: CData<FinSetKernel> = CData::single("*", 2);
        let hp = hom_poset(&source, &target, &Caps::default()).unwrap();
        assert_eq!(hp.morphisms.len(), 8);
        let related: usize =
            hp.leq.iter().map(|row| row.iter().filter(|&&b| b).count()).sum();
        // 8 reflexive pairs plus one strict pair per hi-based comorphism.
        assert_eq!(related, 12);
        for (i, f) in hp.morphisms.iter().enumerate() {
            for (j, g) in hp.morphisms.iter().enumerate() {
                if hp.leq[i][j] && i != j {
                    assert!(f.base().pointwise_leq(g.base()).unwrap());
                    assert_ne!(f.base(), g.base());
                }
            }
        }
    }

    #[test]
    fn ring_fibered_product_over_a_point_is_the_tensor() {
        let z6 = zn(6);
        let base: CData<RingKernel> = CData::single("s", z6.clone());
        let (z2, to_z2) = quotient(&z6, &[0, 2, 4]).unwrap();
        let (z3, to_z3) = quotient(&z6, &[0, 3]).unwrap();
        let left_data: CData<RingKernel> = CData::single("u", z2);
        let right_data: CData<RingKernel> = CData::single("v", z3);
        let pt = Poset::point("u");
        let f = CDataMorphism::new(
            &left_data,
            &base,
            MonotoneMap::new(pt.clone(), base.shape().clone(), vec![0]).unwrap(),
            vec![to_z2],
        )
        .unwrap();
        let pt2 = Poset::point("v");
        let g = CDataMorphism::new(
            &right_data,
            &base,
            MonotoneMap::new(pt2, base.shape().clone(), vec![0]).unwrap(),
            vec![to_z3],
        )
        .unwrap();
        let fp = fibered_product(&f, &g, &Caps::default()).unwrap();
        assert_eq!(fp.object.len(), 1);
        assert!(fp.object.stalk(0).is_zero_ring());
    }

    #[test]
    fn set_fibered_product_pairing_satisfies_the_universal_property() {
        let pt: CData<FinSetKernel> = CData::single("s", 1);
        let two: CData<FinSetKernel> = CData::single("u", 2);
        let bang = |d: &CData<FinSetKernel>| {
            CDataMorphism::new(
                d,
                &pt,
                MonotoneMap::new(d.shape().clone(), pt.shape().clone(), vec![0]).unwrap(),
                vec![SetMap::new(1, 2, vec![0]).unwrap()],
            )
            .unwrap()
        };
        let f = bang(&two);
        let fp = fibered_product(&f, &f, &Caps::default()).unwrap();
        let diag = fp.pair(&CDataMorphism::identity(&two), &CDataMorphism::identity(&two)).unwrap();
        assert_eq!(fp.to_left.compose(&diag).unwrap(), CDataMorphism::identity(&two));
        assert_eq!(fp.to_right.compose(&diag).unwrap(), CDataMorphism::identity(&two));
    }

    #[test]
    fn fibered_product_shape_is_the_pair_poset() {
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let id = SetMap::new(1, 1, vec![0]).unwrap();
        let mut given = BTreeMap::new();
        for (x, y) in chain.covers() {
            given.insert((x, y), id.clone());
        }
        let chain_data: CData<FinSetKernel> = CData::new(chain.clone(), vec![1, 1], given).unwrap();
        let pt: CData<FinSetKernel> = CData::single("s", 1);
        let f = CDataMorphism::new(
            &chain_data,
            &pt,
            MonotoneMap::new(chain.clone(), pt.shape().clone(), vec![0, 0]).unwrap(),
            vec![id.clone(), id.clone()],
        )
        .unwrap();
        let fp = fibered_product(&f, &f, &Caps::default()).unwrap();
        assert_eq!(fp.object.len(), 4);
        let minima = fp.object.shape().minimal_elements();
        assert_eq!(minima.len(), 1);
    }
}
