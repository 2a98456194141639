//! Poset-indexed families of structured data and the cylinder that glues
//! a family into a single structured poset.
//!
//! A family assigns to each index point p a data object X(p) and to each
//! p <= q a transition X_pq from X(q) to X(p); transitions compose
//! strictly. The cylinder stacks all fibers into one space whose order
//! across fibers is borrowed through the transition base maps, and it is
//! the lax colimit of the family: morphisms out of the cylinder match
//! transformation families whose squares commute only up to the two-cell
//! order. Both sides are enumerated here and compared, order included.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::cdata::{
    fibered_product, hom_poset, two_cell_leq, CData, CDataMorphism, FiberedProduct,
};
use crate::kernel::{tuple_name, Kernel, KernelError, KernelPushouts};
use crate::poset::{
    complete_over_poset, diagram_colimit, pair_id, MonotoneMap, Poset, PosetColimit, PosetError,
};

pub struct LaxDatum<K: Kernel> {
    index: Poset,
    fibers: Vec<CData<K>>,
    /// trans[(p,q)] for p <= q: the transition X(q) -> X(p).
    trans: BTreeMap<(usize, usize), CDataMorphism<K>>,
}

impl<K: Kernel> Clone for LaxDatum<K> {
    fn clone(&self) -> Self {
        LaxDatum { index: self.index.clone(), fibers: self.fibers.clone(), trans: self.trans.clone() }
    }
}

impl<K: Kernel> PartialEq for LaxDatum<K> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.fibers == other.fibers && self.trans == other.trans
    }
}
impl<K: Kernel> Eq for LaxDatum<K> {}

impl<K: Kernel> core::fmt::Debug for LaxDatum<K> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LaxDatum")
            .field("index", &self.index)
            .field("fibers", &self.fibers)
            .finish_non_exhaustive()
    }
}

impl<K: Kernel> LaxDatum<K> {
    /// Builds a family from transitions given on at least the cover pairs
    /// of the index; composites are filled in and checked strictly.
    pub fn new(
        index: Poset,
        fibers: Vec<CData<K>>,
        given: BTreeMap<(usize, usize), CDataMorphism<K>>,
    ) -> Result<LaxDatum<K>, KernelError> {
        if fibers.len() != index.len() {
            return Err(KernelError::Structural("one fiber per index point is required".into()));
        }
        for (&(p, q), t) in &given {
            if p >= index.len() || q >= index.len() || !index.leq(p, q) {
                return Err(KernelError::Structural(format!(
                    "transition key ({p},{q}) is not a related pair"
                )));
            }
            if t.source() != &fibers[q] || t.target() != &fibers[p] {
                return Err(KernelError::Structural(format!(
                    "transition ({p},{q}) does not run from fiber {q} to fiber {p}"
                )));
            }
        }
        let trans = complete_over_poset(
            &index,
            &given,
            |p| CDataMorphism::identity(&fibers[p]),
            |outer, inner| {
                outer
                    .compose(inner)
                    .map_err(|e| PosetError::NonFunctorialTransitions(format!("{e}")))
            },
        )?;
        Ok(LaxDatum { index, fibers, trans })
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn fiber(&self, p: usize) -> &CData<K> {
        &self.fibers[p]
    }

    pub fn fibers(&self) -> &[CData<K>] {
        &self.fibers
    }

    /// The transition X(q) -> X(p) for p <= q.
    pub fn transition(&self, p: usize, q: usize) -> &CDataMorphism<K> {
        self.trans.get(&(p, q)).expect("transition for a related pair")
    }

    /// The family induced on an open (up-closed) subset of the index,
    /// together with the original index of each kept point.
    pub fn restrict_to_up_set(&self, mask: u64) -> Result<(LaxDatum<K>, Vec<usize>), KernelError> {
        if !self.index.is_up_closed(mask) {
            return Err(KernelError::Structural(
                "family restriction requires an up-closed index subset".into(),
            ));
        }
        let kept = crate::poset::bits(mask);
        let sub = self.index.restrict(mask);
        let fibers: Vec<CData<K>> = kept.iter().map(|&r| self.fibers[r].clone()).collect();
        let mut given = BTreeMap::new();
        for (a, b) in sub.related_pairs() {
            if a != b {
                given.insert((a, b), self.transition(kept[a], kept[b]).clone());
            }
        }
        Ok((LaxDatum::new(sub, fibers, given)?, kept))
    }
}

/// The family whose fiber at p is the single point carrying the stalk of
/// the input at p; transitions are the restrictions.
pub fn points_datum<K: Kernel>(f: &CData<K>) -> Result<LaxDatum<K>, KernelError> {
    let index = f.shape().clone();
    let fibers: Vec<CData<K>> = (0..f.len())
        .map(|p| CData::single(index.id(p), f.stalk(p).clone()))
        .collect();
    let mut given = BTreeMap::new();
    for (p, q) in index.covers() {
        let base = MonotoneMap::new(
            fibers[q].shape().clone(),
            fibers[p].shape().clone(),
            vec![0],
        )?;
        let t = CDataMorphism::new(&fibers[q], &fibers[p], base, vec![f.res(p, q).clone()])?;
        given.insert((p, q), t);
    }
    LaxDatum::new(index, fibers, given)
}

/// The family over a one-point index whose only fiber is the input.
pub fn single_datum<K: Kernel>(index_id: &str, f: &CData<K>) -> Result<LaxDatum<K>, KernelError> {
    LaxDatum::new(Poset::point(index_id), vec![f.clone()], BTreeMap::new())
}

pub struct Cylinder<K: Kernel> {
    pub data: CData<K>,
    /// origin[k] = (index point, fiber-local point) of cylinder point k.
    pub origin: Vec<(usize, usize)>,
    /// inclusions[p]: fiber(p) -> data.
    pub inclusions: Vec<CDataMorphism<K>>,
    point_of: BTreeMap<(usize, usize), usize>,
}

impl<K: Kernel> Cylinder<K> {
    /// The cylinder point over fiber point x of index point p.
    pub fn point(&self, p: usize, x: usize) -> usize {
        self.point_of[&(p, x)]
    }
}

/// Glues a family into one data object: points are tagged fiber points,
/// the order across fibers is x_p <= y_q iff p <= q and x <= X_pq(y), and
/// cross-fiber restrictions factor through the transition comorphisms.
pub fn cylinder<K: Kernel>(x: &LaxDatum<K>) -> Result<Cylinder<K>, KernelError> {
    let index = x.index();
    let mut by_id: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for p in 0..index.len() {
        let fiber_shape = x.fiber(p).shape();
        for k in 0..fiber_shape.len() {
            by_id.insert(pair_id(index.id(p), fiber_shape.id(k)), (p, k));
        }
    }
    if by_id.len() != (0..index.len()).map(|p| x.fiber(p).len()).sum::<usize>() {
        return Err(KernelError::Structural("cylinder point tags collide".into()));
    }
    let ids: Vec<&String> = by_id.keys().collect();
    let leq = |a: (usize, usize), b: (usize, usize)| -> bool {
        let (p, xp) = a;
        let (q, yq) = b;
        index.leq(p, q) && {
            let down = x.transition(p, q).base().apply(yq);
            x.fiber(p).shape().leq(xp, down)
        }
    };
    let shape = Poset::from_relation(&ids, |a, b| leq(by_id[a], by_id[b]))?;
    let origin: Vec<(usize, usize)> = shape.ids().iter().map(|id| by_id[id]).collect();
    let point_of: BTreeMap<(usize, usize), usize> =
        origin.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    let stalks: Vec<K::Obj> =
        origin.iter().map(|&(p, k)| x.fiber(p).stalk(k).clone()).collect();
    let mut given = BTreeMap::new();
    for (a, b) in shape.related_pairs() {
        if a == b {
            continue;
        }
        let (p, xp) = origin[a];
        let (q, yq) = origin[b];
        let t = x.transition(p, q);
        let within = x.fiber(p).res(xp, t.base().apply(yq));
        given.insert((a, b), K::compose(t.co(yq), within)?);
    }
    let data = CData::new(shape, stalks, given)?;
    let mut inclusions = Vec::with_capacity(index.len());
    for p in 0..index.len() {
        let fiber = x.fiber(p);
        let base = MonotoneMap::new(
            fiber.shape().clone(),
            data.shape().clone(),
            (0..fiber.len()).map(|k| point_of[&(p, k)]).collect(),
        )?;
        let co = (0..fiber.len()).map(|k| K::identity(fiber.stalk(k))).collect();
        inclusions.push(CDataMorphism::new(fiber, &data, base, co)?);
    }
    Ok(Cylinder { data, origin, inclusions, point_of })
}

/// Cylinder of the points family, renamed back to the original ids. The
/// composite is the identity on data objects.
pub fn cylinder_of_points<K: Kernel>(f: &CData<K>) -> Result<CData<K>, KernelError> {
    let datum = points_datum(f)?;
    let cyl = cylinder(&datum)?;
    let new_ids: Vec<String> =
        cyl.origin.iter().map(|&(p, _)| f.shape().id(p).to_string()).collect();
    cyl.data.relabel(&new_ids)
}

/// Cylinder of the one-fiber family, renamed back to the fiber ids. The
/// composite is the identity on data objects.
pub fn cylinder_of_single<K: Kernel>(
    index_id: &str,
    f: &CData<K>,
) -> Result<CData<K>, KernelError> {
    let datum = single_datum(index_id, f)?;
    let cyl = cylinder(&datum)?;
    let new_ids: Vec<String> =
        cyl.origin.iter().map(|&(_, k)| f.shape().id(k).to_string()).collect();
    cyl.data.relabel(&new_ids)
}

/// Glues per-fiber morphisms legs[p]: X(p) -> T into one morphism off the
/// cylinder. The legs must form a strict cocone (legs[p] after X_pq equals
/// legs[q]); that is exactly the naturality the construction re-verifies.
pub fn glue_fiber_maps<K: Kernel>(
    cyl: &Cylinder<K>,
    legs: &[CDataMorphism<K>],
    target: &CData<K>,
) -> Result<CDataMorphism<K>, KernelError> {
    let mut base_map = Vec::with_capacity(cyl.origin.len());
    let mut co = Vec::with_capacity(cyl.origin.len());
    for &(p, k) in &cyl.origin {
        let leg = legs.get(p).ok_or_else(|| {
            KernelError::Structural("one leg per fiber is required to glue".into())
        })?;
        if leg.target() != target {
            return Err(KernelError::Structural("glue legs must share the target".into()));
        }
        base_map.push(leg.base().apply(k));
        co.push(leg.co(k).clone());
    }
    let base = MonotoneMap::new(cyl.data.shape().clone(), target.shape().clone(), base_map)?;
    CDataMorphism::new(&cyl.data, target, base, co)
}

/// A morphism of families: a monotone map of index posets and a component
/// per index point, commuting with the transitions on the nose.
pub struct LaxDatumMorphism<K: Kernel> {
    source: LaxDatum<K>,
    target: LaxDatum<K>,
    shape_map: MonotoneMap,
    /// components[p]: X(p) -> Y(shape_map(p)).
    components: Vec<CDataMorphism<K>>,
}

impl<K: Kernel> Clone for LaxDatumMorphism<K> {
    fn clone(&self) -> Self {
        LaxDatumMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            shape_map: self.shape_map.clone(),
            components: self.components.clone(),
        }
    }
}

impl<K: Kernel> PartialEq for LaxDatumMorphism<K> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.shape_map == other.shape_map
            && self.components == other.components
    }
}
impl<K: Kernel> Eq for LaxDatumMorphism<K> {}

impl<K: Kernel> LaxDatumMorphism<K> {
    pub fn new(
        source: &LaxDatum<K>,
        target: &LaxDatum<K>,
        shape_map: MonotoneMap,
        components: Vec<CDataMorphism<K>>,
    ) -> Result<LaxDatumMorphism<K>, KernelError> {
        if shape_map.source() != source.index() || shape_map.target() != target.index() {
            return Err(KernelError::Structural("shape map does not match the indices".into()));
        }
        if components.len() != source.index().len() {
            return Err(KernelError::Structural("one component per index point is required".into()));
        }
        for p in 0..source.index().len() {
            if components[p].source() != source.fiber(p)
                || components[p].target() != target.fiber(shape_map.apply(p))
            {
                return Err(KernelError::Structural(format!(
                    "component at {} has the wrong endpoints",
                    source.index().id(p)
                )));
            }
        }
        for (p, q) in source.index().related_pairs() {
            if p == q {
                continue;
            }
            let via_source = components[p].compose(source.transition(p, q))?;
            let via_target = target
                .transition(shape_map.apply(p), shape_map.apply(q))
                .compose(&components[q])?;
            if via_source != via_target {
                return Err(KernelError::Structural(format!(
                    "components do not commute with transitions across {} <= {}",
                    source.index().id(p),
                    source.index().id(q)
                )));
            }
        }
        Ok(LaxDatumMorphism {
            source: source.clone(),
            target: target.clone(),
            shape_map,
            components,
        })
    }

    pub fn identity(x: &LaxDatum<K>) -> LaxDatumMorphism<K> {
        LaxDatumMorphism {
            source: x.clone(),
            target: x.clone(),
            shape_map: MonotoneMap::identity(x.index()),
            components: (0..x.index().len())
                .map(|p| CDataMorphism::identity(x.fiber(p)))
                .collect(),
        }
    }

    pub fn source(&self) -> &LaxDatum<K> {
        &self.source
    }

    pub fn target(&self) -> &LaxDatum<K> {
        &self.target
    }

    pub fn shape_map(&self) -> &MonotoneMap {
        &self.shape_map
    }

    pub fn component(&self, p: usize) -> &CDataMorphism<K> {
        &self.components[p]
    }

    /// self after first.
    pub fn compose(&self, first: &LaxDatumMorphism<K>) -> Result<LaxDatumMorphism<K>, KernelError> {
        if first.target != self.source {
            return Err(KernelError::Structural("family morphisms do not compose".into()));
        }
        let shape_map = self.shape_map.compose(&first.shape_map)?;
        let mut components = Vec::with_capacity(first.components.len());
        for p in 0..first.components.len() {
            let mid = first.shape_map.apply(p);
            components.push(self.components[mid].compose(&first.components[p])?);
        }
        LaxDatumMorphism::new(&first.source, &self.target, shape_map, components)
    }
}

/// The glued morphism between cylinders, acting fiberwise.
pub fn cylinder_map<K: Kernel>(
    phi: &LaxDatumMorphism<K>,
    src: &Cylinder<K>,
    dst: &Cylinder<K>,
) -> Result<CDataMorphism<K>, KernelError> {
    let mut base_map = Vec::with_capacity(src.origin.len());
    let mut co = Vec::with_capacity(src.origin.len());
    for &(p, k) in &src.origin {
        let q = phi.shape_map().apply(p);
        let image = phi.component(p).base().apply(k);
        base_map.push(dst.point(q, image));
        co.push(phi.component(p).co(k).clone());
    }
    let base = MonotoneMap::new(src.data.shape().clone(), dst.data.shape().clone(), base_map)?;
    CDataMorphism::new(&src.data, &dst.data, base, co)
}

/// Families of morphisms out of the fibers, lax over the index: for
/// p <= q the square with the transition commutes up to the two-cell
/// order. `leq` is the componentwise two-cell order.
pub struct TransformationSet<K: Kernel> {
    pub families: Vec<Vec<CDataMorphism<K>>>,
    pub leq: Vec<Vec<bool>>,
}

pub fn lax_transformations<K: Kernel>(
    x: &LaxDatum<K>,
    y: &CData<K>,
    caps: &Caps,
) -> Result<TransformationSet<K>, KernelError> {
    let n = x.index().len();
    let per_fiber: Vec<Vec<CDataMorphism<K>>> = (0..n)
        .map(|p| hom_poset(x.fiber(p), y, caps).map(|hp| hp.morphisms))
        .collect::<Result<_, _>>()?;
    let total: u128 = per_fiber.iter().map(|m| m.len() as u128).product();
    if total > caps.hom_budget as u128 {
        return Err(KernelError::SizeCapExceeded {
            what: "transformation families",
            size: total.min(usize::MAX as u128) as usize,
            cap: caps.hom_budget,
        });
    }
    let related: Vec<(usize, usize)> = x
        .index()
        .related_pairs()
        .into_iter()
        .filter(|&(p, q)| p != q)
        .collect();
    let mut families = Vec::new();
    if per_fiber.iter().all(|m| !m.is_empty()) {
        let mut pick = vec![0usize; n];
        'enumerate: loop {
            let family: Vec<CDataMorphism<K>> =
                (0..n).map(|p| per_fiber[p][pick[p]].clone()).collect();
            let mut lax = true;
            for &(p, q) in &related {
                let pulled = family[p].compose(x.transition(p, q))?;
                if !two_cell_leq(&pulled, &family[q])? {
                    lax = false;
                    break;
                }
            }
            if lax {
                families.push(family);
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'enumerate;
                }
                pos -= 1;
                pick[pos] += 1;
                if pick[pos] < per_fiber[pos].len() {
                    break;
                }
                pick[pos] = 0;
            }
        }
    }
    let mut leq = vec![vec![false; families.len()]; families.len()];
    for i in 0..families.len() {
        for j in 0..families.len() {
            let mut le = true;
            for p in 0..n {
                if !two_cell_leq(&families[i][p], &families[j][p])? {
                    le = false;
                    break;
                }
            }
            leq[i][j] = le;
        }
    }
    Ok(TransformationSet { families, leq })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalityReport {
    pub iso_found: bool,
    pub hom_count: usize,
    pub transformation_count: usize,
    pub failure: Option<String>,
}

/// Checks the colimit property of the cylinder against one test object:
/// restriction along the fiber inclusions must be a bijection from
/// morphisms out of the cylinder to lax transformation families, and must
/// match the two-cell orders in both directions.
pub fn verify_lax_colimit<K: Kernel>(
    x: &LaxDatum<K>,
    y: &CData<K>,
    caps: &Caps,
) -> Result<UniversalityReport, KernelError> {
    let cyl = cylinder(x)?;
    let hp = hom_poset(&cyl.data, y, caps)?;
    let lt = lax_transformations(x, y, caps)?;
    let mut report = UniversalityReport {
        iso_found: true,
        hom_count: hp.morphisms.len(),
        transformation_count: lt.families.len(),
        failure: None,
    };
    let fail = |r: &mut UniversalityReport, msg: String| {
        r.iso_found = false;
        if r.failure.is_none() {
            r.failure = Some(msg);
        }
    };
    let mut image = Vec::with_capacity(hp.morphisms.len());
    for (i, h) in hp.morphisms.iter().enumerate() {
        let family: Vec<CDataMorphism<K>> = cyl
            .inclusions
            .iter()
            .map(|inc| h.compose(inc))
            .collect::<Result<_, _>>()?;
        match lt.families.iter().position(|f| *f == family) {
            Some(j) => image.push(j),
            None => {
                fail(&mut report, format!("restriction of morphism {i} is not a lax family"));
                return Ok(report);
            }
        }
    }
    if hp.morphisms.len() != lt.families.len() {
        fail(
            &mut report,
            format!(
                "{} morphisms out of the cylinder vs {} lax families",
                hp.morphisms.len(),
                lt.families.len()
            ),
        );
    }
    for i in 0..image.len() {
        for j in 0..image.len() {
            if i != j && image[i] == image[j] {
                fail(&mut report, format!("morphisms {i} and {j} restrict to the same family"));
            }
        }
    }
    if report.iso_found {
        for i in 0..image.len() {
            for j in 0..image.len() {
                if hp.leq[i][j] != lt.leq[image[i]][image[j]] {
                    fail(
                        &mut report,
                        format!("two-cell order disagrees between morphisms {i} and {j}"),
                    );
                }
            }
        }
    }
    Ok(report)
}

/// The canonical comparison from the cylinder to the one-categorical
/// colimit of the fiber shapes: each point goes to its class. Checked to
/// be monotone, surjective on classes and a cocone morphism.
pub fn comparison_to_colimit<K: Kernel>(
    x: &LaxDatum<K>,
    cyl: &Cylinder<K>,
) -> Result<(MonotoneMap, PosetColimit), KernelError> {
    let n = x.index().len();
    let objects: Vec<Poset> = (0..n).map(|p| x.fiber(p).shape().clone()).collect();
    let mut arrows = Vec::new();
    for (p, q) in x.index().related_pairs() {
        if p != q {
            arrows.push((q, p, x.transition(p, q).base().clone()));
        }
    }
    let col = diagram_colimit(&objects, &arrows)?;
    let map: Vec<usize> =
        cyl.origin.iter().map(|&(p, k)| col.legs[p].apply(k)).collect();
    let comparison = MonotoneMap::new(cyl.data.shape().clone(), col.poset.clone(), map)?;
    for p in 0..n {
        let through_cylinder = comparison.compose(cyl.inclusions[p].base())?;
        if through_cylinder != col.legs[p] {
            return Err(KernelError::Structural(format!(
                "comparison is not a cocone morphism at index {}",
                x.index().id(p)
            )));
        }
    }
    let mut hit = vec![false; col.poset.len()];
    for &c in comparison.map() {
        hit[c] = true;
    }
    if hit.iter().any(|&h| !h) {
        return Err(KernelError::Structural("comparison misses a colimit class".into()));
    }
    Ok((comparison, col))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCommuteReport {
    pub equal: bool,
    pub fiberwise_points: usize,
    pub glued_points: usize,
    pub witness: Option<String>,
}

/// Compares the two routes around the square: gluing the fiberwise
/// products against the product of the glued spaces. Both routes are
/// built from the same stalk pushouts, so agreement is literal equality
/// after renaming the fiberwise route's points.
pub fn check_fiber_product_commute<K: KernelPushouts>(
    f: &LaxDatumMorphism<K>,
    g: &LaxDatumMorphism<K>,
    caps: &Caps,
) -> Result<FiberCommuteReport, KernelError> {
    if f.target() != g.target() {
        return Err(KernelError::Structural("legs have different targets".into()));
    }
    if f.source().index() != f.target().index()
        || g.source().index() != g.target().index()
        || !f.shape_map().is_identity()
        || !g.shape_map().is_identity()
    {
        return Err(KernelError::Structural(
            "fiber product comparison expects index-preserving legs".into(),
        ));
    }
    let x = f.source();
    let ydat = g.source();
    let z = f.target();
    let index = x.index();
    // Route one: product fiber by fiber, then glue.
    let mut products: Vec<FiberedProduct<K>> = Vec::with_capacity(index.len());
    for p in 0..index.len() {
        products.push(fibered_product(f.component(p), g.component(p), caps)?);
    }
    let mut given = BTreeMap::new();
    for (p, q) in index.covers() {
        let left_leg = x.transition(p, q).compose(&products[q].to_left)?;
        let right_leg = ydat.transition(p, q).compose(&products[q].to_right)?;
        given.insert((p, q), products[p].pair(&left_leg, &right_leg)?);
    }
    let w = LaxDatum::new(
        index.clone(),
        products.iter().map(|fp| fp.object.clone()).collect(),
        given,
    )?;
    let cyl_w = cylinder(&w)?;
    // Route two: glue, then take one product.
    let cyl_x = cylinder(x)?;
    let cyl_y = cylinder(ydat)?;
    let cyl_z = cylinder(z)?;
    let cf = cylinder_map(f, &cyl_x, &cyl_z)?;
    let cg = cylinder_map(g, &cyl_y, &cyl_z)?;
    let big = fibered_product(&cf, &cg, caps)?;
    // Rename route one's points to route two's tags.
    let new_ids: Vec<String> = cyl_w
        .origin
        .iter()
        .map(|&(p, k)| {
            let (a, b) = products[p].pairs()[k];
            tuple_name(&[
                pair_id(index.id(p), x.fiber(p).shape().id(a)),
                pair_id(index.id(p), ydat.fiber(p).shape().id(b)),
            ])
        })
        .collect();
    let renamed = cyl_w.data.relabel(&new_ids)?;
    let equal = renamed == big.object;
    let witness = if equal {
        None
    } else if renamed.shape() != big.object.shape() {
        Some("point sets or orders differ".to_string())
    } else {
        let mut found = None;
        for k in 0..renamed.len() {
            if renamed.stalk(k) != big.object.stalk(k) {
                found = Some(format!("stalks differ at {}", renamed.shape().id(k)));
                break;
            }
        }
        if found.is_none() {
            for (a, b) in renamed.shape().related_pairs() {
                if renamed.res(a, b) != big.object.res(a, b) {
                    found = Some(format!(
                        "restrictions differ across {} <= {}",
                        renamed.shape().id(a),
                        renamed.shape().id(b)
                    ));
                    break;
                }
            }
        }
        Some(found.unwrap_or_else(|| "unlocated mismatch".to_string()))
    };
    Ok(FiberCommuteReport {
        equal,
        fiberwise_points: renamed.len(),
        glued_points: big.object.len(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdata::unit_stalks;
    use crate::kernel::{FinSetKernel, RingKernel};
    use crate::poset::circle_model;
    use crate::ring::{quotient, zn, RingHom};

    fn chain2() -> Poset {
        Poset::new(&["0", "1"], &[("0", "1")]).unwrap()
    }

    /// Index {p<q}, X(p) the 2-chain, X(q) a point sent to the bottom.
    fn wedge_example() -> LaxDatum<FinSetKernel> {
        let index = Poset::new(&["p", "q"], &[("p", "q")]).unwrap();
        let p = index.index("p").unwrap();
        let q = index.index("q").unwrap();
        let fiber_p = unit_stalks(&chain2());
        let fiber_q = unit_stalks(&Poset::point("*"));
        let bottom = fiber_p.shape().index("0").unwrap();
        let base = MonotoneMap::new(
            fiber_q.shape().clone(),
            fiber_p.shape().clone(),
            vec![bottom],
        )
        .unwrap();
        let co = vec![crate::kernel::SetMap::new(1, 1, vec![0]).unwrap()];
        let t = CDataMorphism::new(&fiber_q, &fiber_p, base, co).unwrap();
        let mut fibers = vec![None, None];
        fibers[p] = Some(fiber_p);
        fibers[q] = Some(fiber_q);
        let mut given = BTreeMap::new();
        given.insert((p, q), t);
        LaxDatum::new(index, fibers.into_iter().map(Option::unwrap).collect(), given).unwrap()
    }

    #[test]
    fn cylinder_of_the_wedge_example_is_a_three_point_vee() {
        let x = wedge_example();
        let cyl = cylinder(&x).unwrap();
        assert_eq!(cyl.data.len(), 3);
        let p0 = cyl.data.shape().index("p/0").unwrap();
        let p1 = cyl.data.shape().index("p/1").unwrap();
        let qs = cyl.data.shape().index("q/*").unwrap();
        assert!(cyl.data.shape().leq(p0, p1));
        assert!(cyl.data.shape().leq(p0, qs));
        assert!(!cyl.data.shape().leq(p1, qs));
        assert!(!cyl.data.shape().leq(qs, p1));
    }

    #[test]
    fn cylinder_restricted_to_a_fiber_keeps_its_order() {
        let x = wedge_example();
        let cyl = cylinder(&x).unwrap();
        let p = x.index().index("p").unwrap();
        for a in 0..x.fiber(p).len() {
            for b in 0..x.fiber(p).len() {
                assert_eq!(
                    x.fiber(p).shape().leq(a, b),
                    cyl.data.shape().leq(cyl.point(p, a), cyl.point(p, b))
                );
            }
        }
    }

    #[test]
    fn points_identity_law_on_ring_data() {
        let shape = circle_model();
        let r = zn(2);
        let mut given = BTreeMap::new();
        for (a, b) in shape.covers() {
            given.insert((a, b), RingHom::identity(&r));
        }
        let f: CData<RingKernel> =
            CData::new(shape, vec![r.clone(), r.clone(), r.clone(), r], given).unwrap();
        assert_eq!(cylinder_of_points(&f).unwrap(), f);
    }

    #[test]
    fn single_fiber_identity_law() {
        let f = unit_stalks(&circle_model());
        assert_eq!(cylinder_of_single("idx", &f).unwrap(), f);
    }

    #[test]
    fn cylinder_map_of_the_identity_is_the_identity() {
        let x = wedge_example();
        let cyl = cylinder(&x).unwrap();
        let id = LaxDatumMorphism::identity(&x);
        let glued = cylinder_map(&id, &cyl, &cyl).unwrap();
        assert_eq!(glued, CDataMorphism::identity(&cyl.data));
    }

    #[test]
    fn cylinder_map_respects_composition() {
        let x = wedge_example();
        let cyl = cylinder(&x).unwrap();
        // Collapse the index chain to its bottom point.
        let index = x.index().clone();
        let p = index.index("p").unwrap();
        let single = LaxDatum::new(
            Poset::point("p"),
            vec![x.fiber(p).clone()],
            BTreeMap::new(),
        )
        .unwrap();
        let collapse_shape =
            MonotoneMap::new(index.clone(), single.index().clone(), vec![0, 0]).unwrap();
        let q = index.index("q").unwrap();
        let components = vec![
            CDataMorphism::identity(x.fiber(p)),
            x.transition(p, q).clone(),
        ];
        let mut comps = vec![None, None];
        comps[p] = Some(components[0].clone());
        comps[q] = Some(components[1].clone());
        let collapse = LaxDatumMorphism::new(
            &x,
            &single,
            collapse_shape,
            comps.into_iter().map(Option::unwrap).collect(),
        )
        .unwrap();
        let cyl_single = cylinder(&single).unwrap();
        let id = LaxDatumMorphism::identity(&x);
        let lhs = cylinder_map(&collapse.compose(&id).unwrap(), &cyl, &cyl_single).unwrap();
        let rhs = cylinder_map(&collapse, &cyl, &cyl_single)
            .unwrap()
            .compose(&cylinder_map(&id, &cyl, &cyl).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lax_colimit_property_holds_for_the_wedge_example() {
        let x = wedge_example();
        let y = unit_stalks(&chain2());
        let report = verify_lax_colimit(&x, &y, &Caps::default()).unwrap();
        assert!(report.iso_found, "{:?}", report.failure);
        // Monotone maps from the vee into the 2-chain.
        assert_eq!(report.hom_count, 5);
        assert_eq!(report.transformation_count, 5);
    }

    #[test]
    fn lax_transformations_from_a_single_fiber_are_plain_morphisms() {
        let f = unit_stalks(&chain2());
        let y = unit_stalks(&circle_model());
        let x = single_datum("idx", &f).unwrap();
        let lt = lax_transformations(&x, &y, &Caps::default()).unwrap();
        let hp = hom_poset(&f, &y, &Caps::default()).unwrap();
        assert_eq!(lt.families.len(), hp.morphisms.len());
        assert_eq!(lt.leq, hp.leq);
    }

    #[test]
    fn comparison_identifies_transition_images() {
        let x = wedge_example();
        let cyl = cylinder(&x).unwrap();
        let (comparison, col) = comparison_to_colimit(&x, &cyl).unwrap();
        // The fiber point * lands on the bottom of the chain.
        assert_eq!(col.poset.len(), 2);
        let qs = cyl.data.shape().index("q/*").unwrap();
        let p0 = cyl.data.shape().index("p/0").unwrap();
        assert_eq!(comparison.apply(qs), comparison.apply(p0));
    }

    #[test]
    fn fiber_products_of_point_charts_commute_with_gluing() {
        let z6 = zn(6);
        let (z2, to_z2) = quotient(&z6, &[0, 2, 4]).unwrap();
        let (z3, to_z3) = quotient(&z6, &[0, 3]).unwrap();
        let base: CData<RingKernel> = CData::single("s", z6);
        let left: CData<RingKernel> = CData::single("u", z2);
        let right: CData<RingKernel> = CData::single("v", z3);
        let z = single_datum("i", &base).unwrap();
        let xdat = single_datum("i", &left).unwrap();
        let ydat = single_datum("i", &right).unwrap();
        let f = LaxDatumMorphism::new(
            &xdat,
            &z,
            MonotoneMap::identity(z.index()),
            vec![CDataMorphism::new(
                &left,
                &base,
                MonotoneMap::new(left.shape().clone(), base.shape().clone(), vec![0]).unwrap(),
                vec![to_z2],
            )
            .unwrap()],
        )
        .unwrap();
        let g = LaxDatumMorphism::new(
            &ydat,
            &z,
            MonotoneMap::identity(z.index()),
            vec![CDataMorphism::new(
                &right,
                &base,
                MonotoneMap::new(right.shape().clone(), base.shape().clone(), vec![0]).unwrap(),
                vec![to_z3],
            )
            .unwrap()],
        )
        .unwrap();
        let report = check_fiber_product_commute(&f, &g, &Caps::default()).unwrap();
        assert!(report.equal, "{:?}", report.witness);
        assert_eq!(report.glued_points, 1);
    }

    #[test]
    fn fiber_products_of_identity_legs_commute() {
        let x = wedge_example();
        let id = LaxDatumMorphism::identity(&x);
        let report = check_fiber_product_commute(&id, &id, &Caps::default()).unwrap();
        assert!(report.equal, "{:?}", report.witness);
        assert_eq!(report.fiberwise_points, 3);
    }
}
