//! The three coefficient settings (finite sets, finite posets, finite
//! commutative rings) behind one trait, so that structured-poset data and
//! its checks can be written once.
//!
//! Objects carry a uniform element indexing, morphisms a uniform `apply`,
//! and each setting provides verified construction from raw index maps.
//! Limits are computed as compatible families, colimits by identification,
//! pushouts per setting (tensor product for rings).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::poset::{self, MonotoneMap, Poset, PosetError};
use crate::ring::{self, FinRing, RingError, RingHom};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelError {
    Poset(PosetError),
    Ring(RingError),
    Structural(String),
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },
}

impl From<PosetError> for KernelError {
    fn from(e: PosetError) -> Self {
        KernelError::Poset(e)
    }
}
impl From<RingError> for KernelError {
    fn from(e: RingError) -> Self {
        KernelError::Ring(e)
    }
}

impl core::fmt::Display for KernelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KernelError::Poset(e) => write!(f, "{e}"),
            KernelError::Ring(e) => write!(f, "{e}"),
            KernelError::Structural(d) => write!(f, "structural check failed: {d}"),
            KernelError::SizeCapExceeded { what, size, cap } => {
                write!(f, "size cap exceeded for {what}: {size} > {cap}")
            }
        }
    }
}

pub trait Kernel {
    type Obj: Clone + Eq + Ord + core::fmt::Debug;
    type Mor: Clone + Eq + Ord + core::fmt::Debug;

    const NAME: &'static str;

    fn src(m: &Self::Mor) -> Self::Obj;
    fn dst(m: &Self::Mor) -> Self::Obj;
    fn elements(o: &Self::Obj) -> usize;
    fn element_name(o: &Self::Obj, i: usize) -> String;
    fn apply(m: &Self::Mor, i: usize) -> usize;
    fn identity(o: &Self::Obj) -> Self::Mor;
    fn compose(later: &Self::Mor, first: &Self::Mor) -> Result<Self::Mor, KernelError>;
    /// Verified morphism from an element-index assignment.
    fn mor_from_map(a: &Self::Obj, b: &Self::Obj, map: Vec<usize>) -> Result<Self::Mor, KernelError>;
    /// All morphisms a -> b in a deterministic order (lexicographic on the
    /// assignment vectors).
    fn hom(a: &Self::Obj, b: &Self::Obj, caps: &Caps) -> Result<Vec<Self::Mor>, KernelError>;
    /// The intrinsic order on parallel morphisms; discrete by default.
    fn mor_leq(f: &Self::Mor, g: &Self::Mor) -> Result<bool, KernelError> {
        if Self::src(f) != Self::src(g) || Self::dst(f) != Self::dst(g) {
            return Err(KernelError::Structural("mor_leq on non-parallel morphisms".into()));
        }
        Ok(f == g)
    }
}

/// Limit of a finite diagram as the object of compatible families.
pub struct Limit<K: Kernel + ?Sized> {
    pub obj: K::Obj,
    /// legs[i]: obj -> objects[i].
    pub legs: Vec<K::Mor>,
    /// tuples[e][i]: the i-th component of the e-th element of `obj`.
    pub tuples: Vec<Vec<usize>>,
}

pub trait KernelLimits: Kernel {
    fn limit(
        objects: &[Self::Obj],
        arrows: &[(usize, usize, Self::Mor)],
        caps: &Caps,
    ) -> Result<Limit<Self>, KernelError>;
}

/// The universal map into a limit from a commuting cone; fails if the cone
/// does not commute with the diagram.
pub fn lim_induce<K: KernelLimits>(
    limit: &Limit<K>,
    cone_obj: &K::Obj,
    cone_legs: &[K::Mor],
) -> Result<K::Mor, KernelError> {
    if cone_legs.len() != limit.legs.len() {
        return Err(KernelError::Structural("cone has the wrong number of legs".into()));
    }
    let mut map = Vec::with_capacity(K::elements(cone_obj));
    for e in 0..K::elements(cone_obj) {
        let tuple: Vec<usize> = cone_legs.iter().map(|l| K::apply(l, e)).collect();
        let idx = limit
            .tuples
            .iter()
            .position(|t| *t == tuple)
            .ok_or_else(|| KernelError::Structural("cone does not commute with the diagram".into()))?;
        map.push(idx);
    }
    K::mor_from_map(cone_obj, &limit.obj, map)
}

/// Compatible families of a diagram, enumerated from its root objects and
/// checked against every arrow. Tuples come out in root-assignment order.
fn compatible_tuples<K: Kernel>(
    objects: &[K::Obj],
    arrows: &[(usize, usize, K::Mor)],
    caps: &Caps,
) -> Result<Vec<Vec<usize>>, KernelError> {
    let n = objects.len();
    for (s, t, m) in arrows {
        if *s >= n || *t >= n {
            return Err(KernelError::Structural("arrow endpoint out of range".into()));
        }
        if K::src(m) != objects[*s] || K::dst(m) != objects[*t] {
            return Err(KernelError::Structural("arrow does not match its endpoints".into()));
        }
    }
    let sizes: Vec<usize> = objects.iter().map(|o| K::elements(o)).collect();
    let mut is_root = vec![true; n];
    for (s, t, _) in arrows {
        if s != t {
            is_root[*t] = false;
        }
    }
    // Everything must be reachable from roots; promote stragglers.
    loop {
        let mut reached = is_root.clone();
        loop {
            let mut grew = false;
            for (s, t, _) in arrows {
                if reached[*s] && !reached[*t] {
                    reached[*t] = true;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        match reached.iter().position(|&r| !r) {
            Some(orphan) => is_root[orphan] = true,
            None => break,
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&i| is_root[i]).collect();
    let combos: u128 = roots.iter().map(|&r| sizes[r].max(1) as u128).product();
    if combos > caps.hom_budget as u128 {
        return Err(KernelError::SizeCapExceeded {
            what: "limit family candidates",
            size: combos.min(usize::MAX as u128) as usize,
            cap: caps.hom_budget,
        });
    }
    if roots.iter().any(|&r| sizes[r] == 0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; roots.len()];
    'enumerate: loop {
        let mut values: Vec<Option<usize>> = vec![None; n];
        for (k, &r) in roots.iter().enumerate() {
            values[r] = Some(pick[k]);
        }
        loop {
            let mut grew = false;
            for (s, t, m) in arrows {
                if let Some(v) = values[*s] {
                    if values[*t].is_none() {
                        values[*t] = Some(K::apply(m, v));
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let tuple: Vec<usize> = values.into_iter().map(|v| v.expect("reachable")).collect();
        if arrows.iter().all(|(s, t, m)| K::apply(m, tuple[*s]) == tuple[*t]) {
            out.push(tuple);
        }
        let mut pos = pick.len();
        loop {
            if pos == 0 {
                break 'enumerate;
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < sizes[roots[pos]] {
                break;
            }
            pick[pos] = 0;
        }
    }
    Ok(out)
}

pub struct Colimit<K: Kernel + ?Sized> {
    pub obj: K::Obj,
    /// legs[i]: objects[i] -> obj.
    pub legs: Vec<K::Mor>,
}

pub trait KernelColimits: Kernel {
    fn colimit(
        objects: &[Self::Obj],
        arrows: &[(usize, usize, Self::Mor)],
    ) -> Result<Colimit<Self>, KernelError>;
}

pub struct Pushout<K: Kernel + ?Sized> {
    pub obj: K::Obj,
    /// left: A -> P for the span f: R -> A.
    pub left: K::Mor,
    /// right: B -> P for the span g: R -> B.
    pub right: K::Mor,
    span_left: K::Mor,
    span_right: K::Mor,
}

pub trait KernelPushouts: Kernel + Sized {
    /// Pushout of the span `f: R -> A`, `g: R -> B`.
    fn pushout(f: &Self::Mor, g: &Self::Mor, caps: &Caps) -> Result<Pushout<Self>, KernelError>;

    /// The map out of the pushout induced by a commuting cocone.
    fn po_induce(
        po: &Pushout<Self>,
        on_left: &Self::Mor,
        on_right: &Self::Mor,
    ) -> Result<Self::Mor, KernelError>;
}

/// Shared pushout-by-identification for the set and poset settings, which
/// both take colimits by gluing elements.
fn glued_pushout<K: KernelColimits>(
    f: &K::Mor,
    g: &K::Mor,
) -> Result<Pushout<K>, KernelError> {
    if K::src(f) != K::src(g) {
        return Err(KernelError::Structural("span legs have different sources".into()));
    }
    let objects = vec![K::src(f), K::dst(f), K::dst(g)];
    let arrows = vec![(0usize, 1usize, f.clone()), (0usize, 2usize, g.clone())];
    let col = K::colimit(&objects, &arrows)?;
    let mut legs = col.legs.into_iter();
    let _from_base = legs.next().expect("three legs");
    let left = legs.next().expect("three legs");
    let right = legs.next().expect("three legs");
    Ok(Pushout { obj: col.obj, left, right, span_left: f.clone(), span_right: g.clone() })
}

/// Shared induced-map construction: every pushout class contains the image
/// of a left or right element, and the verified rebuild doubles as the
/// well-definedness check.
fn glued_po_induce<K: Kernel>(
    po: &Pushout<K>,
    on_left: &K::Mor,
    on_right: &K::Mor,
) -> Result<K::Mor, KernelError> {
    if K::src(on_left) != K::dst(&po.span_left) || K::src(on_right) != K::dst(&po.span_right) {
        return Err(KernelError::Structural("cocone legs do not match the span".into()));
    }
    if K::dst(on_left) != K::dst(on_right) {
        return Err(KernelError::Structural("cocone legs land in different objects".into()));
    }
    let around_left = K::compose(on_left, &po.span_left)?;
    let around_right = K::compose(on_right, &po.span_right)?;
    if around_left != around_right {
        return Err(KernelError::Structural("cocone does not commute over the base".into()));
    }
    let target = K::dst(on_left);
    let n = K::elements(&po.obj);
    let mut map = vec![usize::MAX; n];
    for a in 0..K::elements(&K::dst(&po.span_left)) {
        let slot = K::apply(&po.left, a);
        let v = K::apply(on_left, a);
        if map[slot] != usize::MAX && map[slot] != v {
            return Err(KernelError::Structural("cocone is not constant on a pushout class".into()));
        }
        map[slot] = v;
    }
    for b in 0..K::elements(&K::dst(&po.span_right)) {
        let slot = K::apply(&po.right, b);
        let v = K::apply(on_right, b);
        if map[slot] != usize::MAX && map[slot] != v {
            return Err(KernelError::Structural("cocone is not constant on a pushout class".into()));
        }
        map[slot] = v;
    }
    if map.iter().any(|&v| v == usize::MAX) {
        return Err(KernelError::Structural("pushout class missed by both legs".into()));
    }
    K::mor_from_map(&po.obj, &target, map)
}

/// Joins element names into a family name; commas and backslashes in the
/// parts are escaped so distinct tuples get distinct names.
pub fn tuple_name(parts: &[String]) -> String {
    let escaped: Vec<String> = parts
        .iter()
        .map(|p| p.replace('\\', "\\\\").replace(',', "\\,"))
        .collect();
    format!("({})", escaped.join(","))
}

// ---------------------------------------------------------------------------
// Finite sets.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SetMap {
    pub src: usize,
    pub dst: usize,
    pub map: Vec<usize>,
}

impl SetMap {
    pub fn new(src: usize, dst: usize, map: Vec<usize>) -> Result<SetMap, KernelError> {
        if map.len() != src {
            return Err(KernelError::Structural("set map length mismatch".into()));
        }
        if map.iter().any(|&v| v >= dst) {
            return Err(KernelError::Structural("set map value out of range".into()));
        }
        Ok(SetMap { src, dst, map })
    }
}

pub struct FinSetKernel;

impl Kernel for FinSetKernel {
    type Obj = usize;
    type Mor = SetMap;

    const NAME: &'static str = "FinSet";

    fn src(m: &SetMap) -> usize {
        m.src
    }
    fn dst(m: &SetMap) -> usize {
        m.dst
    }
    fn elements(o: &usize) -> usize {
        *o
    }
    fn element_name(_o: &usize, i: usize) -> String {
        i.to_string()
    }
    fn apply(m: &SetMap, i: usize) -> usize {
        m.map[i]
    }
    fn identity(o: &usize) -> SetMap {
        SetMap { src: *o, dst: *o, map: (0..*o).collect() }
    }
    fn compose(later: &SetMap, first: &SetMap) -> Result<SetMap, KernelError> {
        if first.dst != later.src {
            return Err(KernelError::Structural("set maps do not compose".into()));
        }
        Ok(SetMap {
            src: first.src,
            dst: later.dst,
            map: first.map.iter().map(|&i| later.map[i]).collect(),
        })
    }
    fn mor_from_map(a: &usize, b: &usize, map: Vec<usize>) -> Result<SetMap, KernelError> {
        SetMap::new(*a, *b, map)
    }
    fn hom(a: &usize, b: &usize, caps: &Caps) -> Result<Vec<SetMap>, KernelError> {
        let combos = (*b as u128).pow(*a as u32);
        if combos > caps.hom_budget as u128 {
            return Err(KernelError::SizeCapExceeded {
                what: "set maps",
                size: combos.min(usize::MAX as u128) as usize,
                cap: caps.hom_budget,
            });
        }
        if *b == 0 {
            return Ok(if *a == 0 {
                vec![SetMap { src: 0, dst: 0, map: Vec::new() }]
            } else {
                Vec::new()
            });
        }
        let mut out = Vec::with_capacity(combos as usize);
        let mut map = vec![0usize; *a];
        loop {
            out.push(SetMap { src: *a, dst: *b, map: map.clone() });
            let mut pos = map.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                map[pos] += 1;
                if map[pos] < *b {
                    break;
                }
                map[pos] = 0;
            }
        }
    }
}

impl KernelLimits for FinSetKernel {
    fn limit(
        objects: &[usize],
        arrows: &[(usize, usize, SetMap)],
        caps: &Caps,
    ) -> Result<Limit<Self>, KernelError> {
        let tuples = compatible_tuples::<Self>(objects, arrows, caps)?;
        let obj = tuples.len();
        let legs = objects
            .iter()
            .enumerate()
            .map(|(i, &o)| SetMap::new(obj, o, tuples.iter().map(|t| t[i]).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Limit { obj, legs, tuples })
    }
}

impl KernelColimits for FinSetKernel {
    fn colimit(
        objects: &[usize],
        arrows: &[(usize, usize, SetMap)],
    ) -> Result<Colimit<Self>, KernelError> {
        let mut offset = Vec::with_capacity(objects.len());
        let mut total = 0usize;
        for &o in objects {
            offset.push(total);
            total += o;
        }
        for (s, t, m) in arrows {
            if m.src != objects[*s] || m.dst != objects[*t] {
                return Err(KernelError::Structural("arrow does not match its endpoints".into()));
            }
        }
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, t, m) in arrows {
            for x in 0..objects[*s] {
                let a = find(&mut parent, offset[*s] + x);
                let b = find(&mut parent, offset[*t] + m.map[x]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut reps = Vec::new();
        for x in 0..total {
            if find(&mut parent, x) == x {
                reps.push(x);
            }
        }
        let legs = objects
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let map = (0..o)
                    .map(|x| {
                        let r = find(&mut parent, offset[i] + x);
                        reps.binary_search(&r).expect("rep recorded")
                    })
                    .collect();
                SetMap::new(o, reps.len(), map)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Colimit { obj: reps.len(), legs })
    }
}

impl KernelPushouts for FinSetKernel {
    fn pushout(f: &SetMap, g: &SetMap, _caps: &Caps) -> Result<Pushout<Self>, KernelError> {
        glued_pushout::<Self>(f, g)
    }
    fn po_induce(
        po: &Pushout<Self>,
        on_left: &SetMap,
        on_right: &SetMap,
    ) -> Result<SetMap, KernelError> {
        glued_po_induce::<Self>(po, on_left, on_right)
    }
}

// ---------------------------------------------------------------------------
// Finite posets.

pub struct FinPosKernel;

impl Kernel for FinPosKernel {
    type Obj = Poset;
    type Mor = MonotoneMap;

    const NAME: &'static str = "FinPos";

    fn src(m: &MonotoneMap) -> Poset {
        m.source().clone()
    }
    fn dst(m: &MonotoneMap) -> Poset {
        m.target().clone()
    }
    fn elements(o: &Poset) -> usize {
        o.len()
    }
    fn element_name(o: &Poset, i: usize) -> String {
        o.id(i).to_string()
    }
    fn apply(m: &MonotoneMap, i: usize) -> usize {
        m.apply(i)
    }
    fn identity(o: &Poset) -> MonotoneMap {
        MonotoneMap::identity(o)
    }
    fn compose(later: &MonotoneMap, first: &MonotoneMap) -> Result<MonotoneMap, KernelError> {
        Ok(later.compose(first)?)
    }
    fn mor_from_map(a: &Poset, b: &Poset, map: Vec<usize>) -> Result<MonotoneMap, KernelError> {
        Ok(MonotoneMap::new(a.clone(), b.clone(), map)?)
    }
    fn hom(a: &Poset, b: &Poset, caps: &Caps) -> Result<Vec<MonotoneMap>, KernelError> {
        Ok(poset::monotone_maps(a, b, caps)?)
    }
    fn mor_leq(f: &MonotoneMap, g: &MonotoneMap) -> Result<bool, KernelError> {
        Ok(f.pointwise_leq(g)?)
    }
}

impl KernelLimits for FinPosKernel {
    fn limit(
        objects: &[Poset],
        arrows: &[(usize, usize, MonotoneMap)],
        caps: &Caps,
    ) -> Result<Limit<Self>, KernelError> {
        let raw = compatible_tuples::<Self>(objects, arrows, caps)?;
        let named: BTreeMap<String, Vec<usize>> = raw
            .iter()
            .map(|t| {
                let parts: Vec<String> =
                    t.iter().enumerate().map(|(i, &v)| objects[i].id(v).to_string()).collect();
                (tuple_name(&parts), t.clone())
            })
            .collect();
        if named.len() != raw.len() {
            return Err(KernelError::Structural("family names collide".into()));
        }
        let ids: Vec<&String> = named.keys().collect();
        let obj = Poset::from_relation(&ids, |x, y| {
            let (tx, ty) = (&named[x], &named[y]);
            tx.iter().zip(ty.iter()).enumerate().all(|(i, (&a, &b))| objects[i].leq(a, b))
        })?;
        let tuples: Vec<Vec<usize>> =
            obj.ids().iter().map(|id| named[id].clone()).collect();
        let legs = objects
            .iter()
            .enumerate()
            .map(|(i, p)| {
                MonotoneMap::new(obj.clone(), p.clone(), tuples.iter().map(|t| t[i]).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Limit { obj, legs, tuples })
    }
}

impl KernelColimits for FinPosKernel {
    fn colimit(
        objects: &[Poset],
        arrows: &[(usize, usize, MonotoneMap)],
    ) -> Result<Colimit<Self>, KernelError> {
        let col = poset::diagram_colimit(objects, arrows)?;
        Ok(Colimit { obj: col.poset, legs: col.legs })
    }
}

impl KernelPushouts for FinPosKernel {
    fn pushout(f: &MonotoneMap, g: &MonotoneMap, _caps: &Caps) -> Result<Pushout<Self>, KernelError> {
        glued_pushout::<Self>(f, g)
    }
    fn po_induce(
        po: &Pushout<Self>,
        on_left: &MonotoneMap,
        on_right: &MonotoneMap,
    ) -> Result<MonotoneMap, KernelError> {
        glued_po_induce::<Self>(po, on_left, on_right)
    }
}

// ---------------------------------------------------------------------------
// Finite commutative rings. Arrows point along the algebra direction, so
// pushouts are tensor products.

pub struct RingKernel;

impl Kernel for RingKernel {
    type Obj = FinRing;
    type Mor = RingHom;

    const NAME: &'static str = "Ring";

    fn src(m: &RingHom) -> FinRing {
        m.src().clone()
    }
    fn dst(m: &RingHom) -> FinRing {
        m.dst().clone()
    }
    fn elements(o: &FinRing) -> usize {
        o.order()
    }
    fn element_name(o: &FinRing, i: usize) -> String {
        o.name(i).to_string()
    }
    fn apply(m: &RingHom, i: usize) -> usize {
        m.apply(i)
    }
    fn identity(o: &FinRing) -> RingHom {
        RingHom::identity(o)
    }
    fn compose(later: &RingHom, first: &RingHom) -> Result<RingHom, KernelError> {
        Ok(later.compose(first)?)
    }
    fn mor_from_map(a: &FinRing, b: &FinRing, map: Vec<usize>) -> Result<RingHom, KernelError> {
        Ok(RingHom::new(a.clone(), b.clone(), map)?)
    }
    fn hom(a: &FinRing, b: &FinRing, caps: &Caps) -> Result<Vec<RingHom>, KernelError> {
        Ok(ring::ring_homs(a, b, caps)?)
    }
}

impl KernelLimits for RingKernel {
    fn limit(
        objects: &[FinRing],
        arrows: &[(usize, usize, RingHom)],
        caps: &Caps,
    ) -> Result<Limit<Self>, KernelError> {
        let raw = compatible_tuples::<Self>(objects, arrows, caps)?;
        // Compatible families are a subring of the product; build its tables.
        let pos = |t: &[usize]| -> Result<usize, KernelError> {
            raw.iter().position(|u| u == t).ok_or_else(|| {
                KernelError::Structural("families are not closed under operations".into())
            })
        };
        let names: Vec<String> = raw
            .iter()
            .map(|t| {
                let parts: Vec<String> =
                    t.iter().enumerate().map(|(i, &v)| objects[i].name(v).to_string()).collect();
                tuple_name(&parts)
            })
            .collect();
        let mut add_rows = Vec::with_capacity(raw.len());
        let mut mul_rows = Vec::with_capacity(raw.len());
        for x in &raw {
            let mut add_row = Vec::with_capacity(raw.len());
            let mut mul_row = Vec::with_capacity(raw.len());
            for y in &raw {
                let sum: Vec<usize> =
                    (0..objects.len()).map(|i| objects[i].add(x[i], y[i])).collect();
                let prod: Vec<usize> =
                    (0..objects.len()).map(|i| objects[i].mul(x[i], y[i])).collect();
                add_row.push(pos(&sum)?);
                mul_row.push(pos(&prod)?);
            }
            add_rows.push(add_row);
            mul_rows.push(mul_row);
        }
        let obj = FinRing::from_named_tables(names.clone(), &add_rows, &mul_rows)?;
        // The ring constructor renumbers; realign tuples to its order.
        let mut tuples = vec![Vec::new(); raw.len()];
        for (k, name) in names.iter().enumerate() {
            tuples[obj.index_of(name)?] = raw[k].clone();
        }
        let legs = objects
            .iter()
            .enumerate()
            .map(|(i, r)| {
                RingHom::new(obj.clone(), r.clone(), tuples.iter().map(|t| t[i]).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Limit { obj, legs, tuples })
    }
}

impl KernelPushouts for RingKernel {
    fn pushout(f: &RingHom, g: &RingHom, caps: &Caps) -> Result<Pushout<Self>, KernelError> {
        let tensor = ring::tensor_rings(f, g, caps)?;
        Ok(Pushout {
            obj: tensor.ring().clone(),
            left: tensor.left_inject().clone(),
            right: tensor.right_inject().clone(),
            span_left: f.clone(),
            span_right: g.clone(),
        })
    }
    fn po_induce(
        po: &Pushout<Self>,
        on_left: &RingHom,
        on_right: &RingHom,
    ) -> Result<RingHom, KernelError> {
        // Rebuild the tensor to evaluate through pure expressions; the
        // construction is deterministic, so the object agrees.
        let tensor = ring::tensor_rings(&po.span_left, &po.span_right, &Caps::roomy())?;
        if tensor.ring() != &po.obj {
            return Err(KernelError::Structural("pushout object mismatch".into()));
        }
        Ok(tensor.induce(on_left, on_right)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::circle_model;
    use crate::ring::{quotient, zn};

    #[test]
    fn set_hom_enumeration_is_lexicographic() {
        let maps = FinSetKernel::hom(&2, &3, &Caps::default()).unwrap();
        assert_eq!(maps.len(), 9);
        assert_eq!(maps[0].map, vec![0, 0]);
        assert_eq!(maps[8].map, vec![2, 2]);
        for w in maps.windows(2) {
            assert!(w[0].map < w[1].map);
        }
    }

    #[test]
    fn set_hom_budget_is_enforced() {
        let err = FinSetKernel::hom(&8, &8, &Caps::default()).unwrap_err();
        assert!(matches!(err, KernelError::SizeCapExceeded { .. }));
    }

    #[test]
    fn constant_diagram_over_the_circle_has_two_families() {
        // Identity transitions over a connected 4-point shape: a compatible
        // family is a single value, chosen once.
        let p = circle_model();
        let objects = vec![2usize; 4];
        let mut arrows = Vec::new();
        for (i, j) in p.related_pairs() {
            if i != j {
                arrows.push((i, j, FinSetKernel::identity(&2)));
            }
        }
        let lim = FinSetKernel::limit(&objects, &arrows, &Caps::default()).unwrap();
        assert_eq!(lim.obj, 2);
        assert_eq!(lim.tuples, vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn limit_of_empty_diagram_is_a_point() {
        let lim = FinSetKernel::limit(&[], &[], &Caps::default()).unwrap();
        assert_eq!(lim.obj, 1);
        assert_eq!(lim.tuples, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn lim_induce_factors_a_cone() {
        let objects = vec![2usize, 2usize];
        let arrows = Vec::new();
        let lim = FinSetKernel::limit(&objects, &arrows, &Caps::default()).unwrap();
        assert_eq!(lim.obj, 4);
        let cone = vec![
            SetMap::new(2, 2, vec![0, 1]).unwrap(),
            SetMap::new(2, 2, vec![1, 0]).unwrap(),
        ];
        let u = lim_induce::<FinSetKernel>(&lim, &2, &cone).unwrap();
        for e in 0..2 {
            assert_eq!(FinSetKernel::apply(&lim.legs[0], u.map[e]), cone[0].map[e]);
            assert_eq!(FinSetKernel::apply(&lim.legs[1], u.map[e]), cone[1].map[e]);
        }
    }

    #[test]
    fn set_colimit_identifies_along_arrows() {
        let objects = vec![1usize, 2usize];
        let arrows = vec![
            (0, 1, SetMap::new(1, 2, vec![0]).unwrap()),
            (0, 1, SetMap::new(1, 2, vec![1]).unwrap()),
        ];
        let col = FinSetKernel::colimit(&objects, &arrows).unwrap();
        assert_eq!(col.obj, 1);
    }

    #[test]
    fn set_pushout_of_an_interval_glue() {
        // Two 2-sets glued along one point: three classes.
        let f = SetMap::new(1, 2, vec![0]).unwrap();
        let g = SetMap::new(1, 2, vec![0]).unwrap();
        let po = FinSetKernel::pushout(&f, &g, &Caps::default()).unwrap();
        assert_eq!(po.obj, 3);
        let h = FinSetKernel::po_induce(
            &po,
            &SetMap::new(2, 2, vec![0, 1]).unwrap(),
            &SetMap::new(2, 2, vec![0, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(FinSetKernel::compose(&h, &po.left).unwrap().map, vec![0, 1]);
        assert_eq!(FinSetKernel::compose(&h, &po.right).unwrap().map, vec![0, 1]);
    }

    #[test]
    fn po_induce_rejects_non_commuting_cocones() {
        let f = SetMap::new(1, 2, vec![0]).unwrap();
        let po = FinSetKernel::pushout(&f, &f, &Caps::default()).unwrap();
        let err = FinSetKernel::po_induce(
            &po,
            &SetMap::new(2, 2, vec![0, 1]).unwrap(),
            &SetMap::new(2, 2, vec![1, 0]).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, KernelError::Structural(_)));
    }

    #[test]
    fn poset_limit_of_a_constant_chain_is_the_chain() {
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let vee = Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let objects = vec![chain.clone(); 3];
        let mut arrows = Vec::new();
        for (i, j) in vee.related_pairs() {
            if i != j {
                arrows.push((i, j, MonotoneMap::identity(&chain)));
            }
        }
        let lim = FinPosKernel::limit(&objects, &arrows, &Caps::default()).unwrap();
        assert_eq!(lim.obj.len(), 2);
        let lo = lim.obj.index("(lo,lo,lo)").unwrap();
        let hi = lim.obj.index("(hi,hi,hi)").unwrap();
        assert!(lim.obj.leq(lo, hi));
    }

    #[test]
    fn poset_pushout_glues_chains() {
        let pt = Poset::point("*");
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = chain.index("lo").unwrap();
        let hi = chain.index("hi").unwrap();
        let to_hi = MonotoneMap::new(pt.clone(), chain.clone(), vec![hi]).unwrap();
        let to_lo = MonotoneMap::new(pt.clone(), chain.clone(), vec![lo]).unwrap();
        let po = FinPosKernel::pushout(&to_hi, &to_lo, &Caps::default()).unwrap();
        // hi of the left chain is lo of the right: a 3-chain.
        assert_eq!(po.obj.len(), 3);
        let bottom = FinPosKernel::apply(&po.left, lo);
        let top = FinPosKernel::apply(&po.right, hi);
        assert!(po.obj.leq(bottom, top));
        assert_ne!(bottom, top);
    }

    #[test]
    fn ring_limit_over_the_circle_with_identities() {
        let r = zn(2);
        let p = circle_model();
        let objects = vec![r.clone(); 4];
        let mut arrows = Vec::new();
        for (i, j) in p.related_pairs() {
            if i != j {
                arrows.push((i, j, RingHom::identity(&r)));
            }
        }
        let lim = RingKernel::limit(&objects, &arrows, &Caps::default()).unwrap();
        assert_eq!(lim.obj.order(), 2);
    }

    #[test]
    fn ring_limit_of_disconnected_points_is_a_product() {
        let lim = RingKernel::limit(&[zn(2), zn(3)], &[], &Caps::default()).unwrap();
        assert_eq!(lim.obj.order(), 6);
        assert!(ring::find_ring_iso(&lim.obj, &zn(6), &Caps::default()).unwrap().is_some());
    }

    #[test]
    fn ring_pushout_matches_the_tensor() {
        let (_, f) = quotient(&zn(6), &[0, 2, 4]).unwrap();
        let (_, g) = quotient(&zn(6), &[0, 3]).unwrap();
        let po = RingKernel::pushout(&f, &g, &Caps::default()).unwrap();
        assert!(po.obj.is_zero_ring());
    }

    #[test]
    fn ring_po_induce_gives_multiplication() {
        let id = RingHom::identity(&zn(6));
        let po = RingKernel::pushout(&id, &id, &Caps::default()).unwrap();
        let m = RingKernel::po_induce(&po, &id, &id).unwrap();
        assert!(m.is_bijective());
    }

    #[test]
    fn mor_leq_defaults_to_equality_for_sets() {
        let f = SetMap::new(1, 2, vec![0]).unwrap();
        let g = SetMap::new(1, 2, vec![1]).unwrap();
        assert!(FinSetKernel::mor_leq(&f, &f).unwrap());
        assert!(!FinSetKernel::mor_leq(&f, &g).unwrap());
    }

    #[test]
    fn mor_leq_is_pointwise_for_posets() {
        let chain = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = chain.index("lo").unwrap();
        let bot = MonotoneMap::new(chain.clone(), chain.clone(), vec![lo, lo]).unwrap();
        let id = MonotoneMap::identity(&chain);
        assert!(FinPosKernel::mor_leq(&bot, &id).unwrap());
        assert!(!FinPosKernel::mor_leq(&id, &bot).unwrap());
    }
}
