//! Deterministic instance generation for the property suites: small random
//! posets, stalk data over the FinSet and FinPos kernels, lax families,
//! ringed spaces drawn from a pool of reference arrows, covers, and the
//! handful of named examples the suites keep coming back to.
//!
//! Everything here is a pure function of the seed. Generation never calls
//! the system clock or global state, so a corpus can be regenerated
//! byte-for-byte anywhere.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::cdata::{unit_stalks, CData, CDataMorphism};
use crate::cylinder::{single_datum, LaxDatum, LaxDatumMorphism};
use crate::kernel::{FinPosKernel, FinSetKernel, Kernel, KernelError, RingKernel, SetMap};
use crate::poset::{MonotoneMap, Poset};
use crate::ring::{f4, z2_square_zero, zero_ring, zn, FinRing, RingHom};
use crate::rng::Rng;
use crate::schematic::{is_pseudo_schematic, RingedMorphism, RingedPoset};

const IDS: [&str; 4] = ["a", "b", "c", "d"];

/// Strict pairs with nothing in between; the data constructors expect
/// their generating morphisms on exactly these.
fn cover_pairs(p: &Poset) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..p.len() {
        for b in 0..p.len() {
            if a != b
                && p.leq(a, b)
                && !(0..p.len()).any(|z| z != a && z != b && p.leq(a, z) && p.leq(z, b))
            {
                out.push((a, b));
            }
        }
    }
    out
}

/// Random poset on 1..=max_points points. Relations follow a shuffled
/// topological order, so the lexicographic index order of the ids is
/// frequently not a linear extension.
pub fn random_poset(rng: &mut Rng, max_points: usize) -> Poset {
    let n = rng.range(1, max_points.min(IDS.len()));
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    let ids = &IDS[..n];
    let mut covers = Vec::new();
    for s in 0..n {
        for t in (s + 1)..n {
            if rng.chance(1, 2) {
                covers.push((ids[order[s]], ids[order[t]]));
            }
        }
    }
    Poset::new(ids, &covers).expect("edges along a shuffled order are acyclic")
}

fn random_monotone(rng: &mut Rng, src: &Poset, dst: &Poset) -> MonotoneMap {
    for _ in 0..32 {
        let map: Vec<usize> = (0..src.len()).map(|_| rng.below(dst.len())).collect();
        if let Ok(m) = MonotoneMap::new(src.clone(), dst.clone(), map) {
            return m;
        }
    }
    MonotoneMap::new(src.clone(), dst.clone(), vec![0; src.len()])
        .expect("a constant map is monotone")
}

/// Random FinSet-stalked data: shape up to max_points, stalk sizes in
/// 1..=max_stalk, restrictions drawn uniformly on the cover pairs.
pub fn random_finset_data(rng: &mut Rng, max_points: usize, max_stalk: usize) -> CData<FinSetKernel> {
    loop {
        let shape = random_poset(rng, max_points);
        let stalks: Vec<usize> = (0..shape.len()).map(|_| rng.range(1, max_stalk)).collect();
        let mut given = BTreeMap::new();
        for (x, y) in cover_pairs(&shape) {
            let map = (0..stalks[x]).map(|_| rng.below(stalks[y])).collect();
            given.insert((x, y), SetMap::new(stalks[x], stalks[y], map).expect("sized to its stalks"));
        }
        if let Ok(data) = CData::new(shape, stalks, given) {
            return data;
        }
    }
}

/// Random FinPos-stalked data: stalks are tiny posets, restrictions
/// random monotone maps on the cover pairs.
pub fn random_finpos_data(rng: &mut Rng, max_points: usize, max_stalk: usize) -> CData<FinPosKernel> {
    loop {
        let shape = random_poset(rng, max_points);
        let stalks: Vec<Poset> = (0..shape.len()).map(|_| random_poset(rng, max_stalk)).collect();
        let mut given = BTreeMap::new();
        for (x, y) in cover_pairs(&shape) {
            given.insert((x, y), random_monotone(rng, &stalks[x], &stalks[y]));
        }
        if let Ok(data) = CData::new(shape, stalks, given) {
            return data;
        }
    }
}

pub fn finset_data(seed: u64, count: usize) -> Vec<CData<FinSetKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_finset_data(&mut rng, 3, 2)).collect()
}

pub fn finpos_data(seed: u64, count: usize) -> Vec<CData<FinPosKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_finpos_data(&mut rng, 3, 2)).collect()
}

/// Transitions are found by rejection: random base plus random
/// comorphisms until the naturality check accepts. Callers fall back to
/// simpler fibers when a draw of fibers admits no morphism at all.
fn try_random_lax<K: Kernel>(
    rng: &mut Rng,
    shape: &Poset,
    fibers: &[CData<K>],
    attempts: usize,
    mut random_mor: impl FnMut(&mut Rng, &K::Obj, &K::Obj) -> K::Mor,
) -> Option<LaxDatum<K>> {
    let mut transitions = BTreeMap::new();
    for (p, q) in cover_pairs(shape) {
        let src = &fibers[q];
        let dst = &fibers[p];
        let mut found = None;
        for _ in 0..attempts {
            let base = random_monotone(rng, src.shape(), dst.shape());
            let co: Vec<K::Mor> = (0..src.len())
                .map(|x| random_mor(rng, dst.stalk(base.apply(x)), src.stalk(x)))
                .collect();
            if let Ok(m) = CDataMorphism::new(src, dst, base, co) {
                found = Some(m);
                break;
            }
        }
        transitions.insert((p, q), found?);
    }
    LaxDatum::new(shape.clone(), fibers.to_vec(), transitions).ok()
}

fn random_set_map(rng: &mut Rng, src: &usize, dst: &usize) -> SetMap {
    let map = (0..*src).map(|_| rng.below(*dst)).collect();
    SetMap::new(*src, *dst, map).expect("sized to its stalks")
}

pub fn random_finset_datum(rng: &mut Rng) -> LaxDatum<FinSetKernel> {
    loop {
        let shape = random_poset(rng, 3);
        let fibers: Vec<_> = (0..shape.len()).map(|_| random_finset_data(rng, 3, 2)).collect();
        if let Some(d) = try_random_lax(rng, &shape, &fibers, 64, random_set_map) {
            return d;
        }
        // Unit stalks admit every monotone base, so this always lands.
        let fibers: Vec<_> =
            (0..shape.len()).map(|_| unit_stalks(&random_poset(rng, 3))).collect();
        if let Some(d) = try_random_lax(rng, &shape, &fibers, 8, random_set_map) {
            return d;
        }
    }
}

fn point_stalks(shape: &Poset) -> CData<FinPosKernel> {
    let stalk = Poset::point("s");
    let given = cover_pairs(shape)
        .into_iter()
        .map(|e| {
            (e, MonotoneMap::new(stalk.clone(), stalk.clone(), vec![0]).expect("identity on a point"))
        })
        .collect();
    CData::new(shape.clone(), vec![stalk; shape.len()], given).expect("point stalks always glue")
}

pub fn random_finpos_datum(rng: &mut Rng) -> LaxDatum<FinPosKernel> {
    let random_mor =
        |rng: &mut Rng, src: &Poset, dst: &Poset| random_monotone(rng, src, dst);
    loop {
        let shape = random_poset(rng, 3);
        let fibers: Vec<_> = (0..shape.len()).map(|_| random_finpos_data(rng, 3, 2)).collect();
        if let Some(d) = try_random_lax(rng, &shape, &fibers, 64, random_mor) {
            return d;
        }
        let fibers: Vec<_> =
            (0..shape.len()).map(|_| point_stalks(&random_poset(rng, 3))).collect();
        if let Some(d) = try_random_lax(rng, &shape, &fibers, 8, random_mor) {
            return d;
        }
    }
}

pub fn lax_finset(seed: u64, count: usize) -> Vec<LaxDatum<FinSetKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_finset_datum(&mut rng)).collect()
}

pub fn lax_finpos(seed: u64, count: usize) -> Vec<LaxDatum<FinPosKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_finpos_datum(&mut rng)).collect()
}

/// The reference rings the ringed corpus draws stalks from.
pub fn ring_pool() -> Vec<FinRing> {
    vec![zn(6), zn(2), zn(3), zn(4), f4(), z2_square_zero(), zero_ring()]
}

/// The additive extension of 1 -> 1; a ring map whenever the target
/// characteristic divides the source's.
pub fn reduction(src: &FinRing, dst: &FinRing) -> RingHom {
    let mut map = vec![0usize; src.order()];
    let mut acc_src = src.zero();
    let mut acc_dst = dst.zero();
    for _ in 0..src.order() {
        map[acc_src] = acc_dst;
        acc_src = src.add(acc_src, src.one());
        acc_dst = dst.add(acc_dst, dst.one());
    }
    RingHom::new(src.clone(), dst.clone(), map).expect("reduction is a ring map")
}

/// Arrows the generator may place on a cover edge leaving a stalk `r`.
/// With `honest` set they are all flat epimorphisms; otherwise a few
/// deliberately broken arrows join the pool (non-flat reductions and a
/// flat non-epimorphism).
fn arrows_from(r: &FinRing, honest: bool) -> Vec<RingHom> {
    let mut out = vec![RingHom::identity(r)];
    let zero = zero_ring();
    if r != &zero {
        out.push(RingHom::new(r.clone(), zero, vec![0; r.order()]).expect("collapse to the zero ring"));
    }
    if r == &zn(6) {
        out.push(reduction(r, &zn(2)));
        out.push(reduction(r, &zn(3)));
    }
    if !honest {
        if r == &zn(4) {
            out.push(reduction(r, &zn(2)));
        }
        if r == &z2_square_zero() {
            out.push(RingHom::new(r.clone(), zn(2), vec![0, 1, 0, 1]).expect("kill the nilpotent"));
        }
        if r == &zn(2) {
            out.push(RingHom::new(r.clone(), f4(), vec![0, 1]).expect("prime field inclusion"));
        }
    }
    out
}

/// A linear extension: any order sorted by down-set size respects the
/// poset order strictly.
fn by_height(p: &Poset) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by_key(|&x| ((0..p.len()).filter(|&z| p.leq(z, x)).count(), x));
    idx
}

fn random_ringed_space_raw(rng: &mut Rng, honest: bool) -> Option<RingedPoset> {
    let shape = random_poset(rng, 3);
    let covers = cover_pairs(&shape);
    let pool = ring_pool();
    let mut stalks: Vec<Option<FinRing>> = vec![None; shape.len()];
    let mut arrows: BTreeMap<(usize, usize), RingHom> = BTreeMap::new();
    for y in by_height(&shape) {
        let lower: Vec<usize> = covers.iter().filter(|&&(_, t)| t == y).map(|&(x, _)| x).collect();
        if lower.is_empty() {
            stalks[y] = Some(pool[rng.below(pool.len())].clone());
            continue;
        }
        let options: Vec<Vec<RingHom>> = lower
            .iter()
            .map(|&x| arrows_from(stalks[x].as_ref().expect("lower points are assigned"), honest))
            .collect();
        // Stalk candidates every incoming edge can reach; the zero ring
        // keeps this nonempty.
        let mut shared: Vec<FinRing> = Vec::new();
        for arrow in &options[0] {
            let t = arrow.dst();
            if !shared.contains(t) && options.iter().all(|o| o.iter().any(|a| a.dst() == t)) {
                shared.push(t.clone());
            }
        }
        let target = shared.get(rng.below(shared.len().max(1)))?.clone();
        stalks[y] = Some(target.clone());
        for (k, &x) in lower.iter().enumerate() {
            let fits: Vec<&RingHom> =
                options[k].iter().filter(|a| a.dst() == &target).collect();
            arrows.insert((x, y), fits[rng.below(fits.len())].clone());
        }
    }
    let stalks = stalks.into_iter().map(|s| s.expect("every point visited")).collect();
    CData::new(shape, stalks, arrows).ok()
}

/// Random ringed space whose restrictions all come from the flat-epi
/// pool, double-checked against the pseudo-schematic oracle.
pub fn random_ringed_space(rng: &mut Rng, caps: &Caps) -> RingedPoset {
    loop {
        if let Some(space) = random_ringed_space_raw(rng, true) {
            if matches!(is_pseudo_schematic(&space, caps), Ok(report) if report.verdict) {
                return space;
            }
        }
    }
}

/// Random ringed space with no guarantees: restriction arrows may fail
/// flatness or epimorphy. Used to exercise hypothesis-failure branches.
pub fn random_ringed_space_any(rng: &mut Rng) -> RingedPoset {
    loop {
        if let Some(space) = random_ringed_space_raw(rng, false) {
            return space;
        }
    }
}

pub fn ringed_spaces(seed: u64, count: usize, caps: &Caps) -> Vec<RingedPoset> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_ringed_space(&mut rng, caps)).collect()
}

/// Inclusion of the subspace above `mask`, with identity comorphisms.
pub fn up_set_inclusion(space: &RingedPoset, mask: u64) -> Result<RingedMorphism, KernelError> {
    let (sub, kept) = space.restrict_to_up_set(mask)?;
    let base = MonotoneMap::new(sub.shape().clone(), space.shape().clone(), kept.clone())?;
    let co: Vec<RingHom> = kept.iter().map(|&x| RingHom::identity(space.stalk(x))).collect();
    CDataMorphism::new(&sub, space, base, co)
}

/// One-point chart landing on point `p` of the space, with the given ring
/// comorphism out of that stalk.
pub fn point_chart(
    space: &RingedPoset,
    p: usize,
    chart: FinRing,
    co: RingHom,
) -> Result<RingedMorphism, KernelError> {
    let source = CData::single("*", chart);
    let base = MonotoneMap::new(source.shape().clone(), space.shape().clone(), vec![p])?;
    CDataMorphism::new(&source, space, base, vec![co])
}

/// Random cover: up-set charts at every minimal point (so the charts
/// jointly reach everything), redundant up-sets at random, and quotient
/// charts over Z/6 stalks now and then.
pub fn random_cover(rng: &mut Rng, caps: &Caps) -> (RingedPoset, Vec<RingedMorphism>) {
    let space = random_ringed_space(rng, caps);
    let shape = space.shape().clone();
    let mut picks = shape.minimal_elements();
    for x in 0..shape.len() {
        if !picks.contains(&x) && rng.chance(1, 2) {
            picks.push(x);
        }
    }
    picks.sort_unstable();
    let mut legs: Vec<RingedMorphism> = picks
        .iter()
        .map(|&x| up_set_inclusion(&space, shape.up_set(x)).expect("up-sets restrict"))
        .collect();
    let z6 = zn(6);
    for x in 0..shape.len() {
        if space.stalk(x) == &z6 && rng.chance(1, 3) {
            legs.push(
                point_chart(&space, x, zn(2), reduction(&z6, &zn(2))).expect("chart lands on x"),
            );
            legs.push(
                point_chart(&space, x, zn(3), reduction(&z6, &zn(3))).expect("chart lands on x"),
            );
        }
    }
    (space, legs)
}

pub fn ringed_covers(seed: u64, count: usize, caps: &Caps) -> Vec<(RingedPoset, Vec<RingedMorphism>)> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_cover(&mut rng, caps)).collect()
}

/// Random ringed lax family for the cylinder criteria. The menu mixes
/// families whose hypotheses hold (schematic fibers, chart inclusions)
/// with families built from the broken arrow pool, so implication checks
/// see both sides.
pub fn random_ringed_datum(rng: &mut Rng, caps: &Caps) -> LaxDatum<RingKernel> {
    loop {
        let pick = rng.below(5);
        let attempt: Option<LaxDatum<RingKernel>> = (|| match pick {
            // A single fiber; the cylinder is the fiber itself.
            0 => {
                let fiber = if rng.chance(2, 3) {
                    random_ringed_space(rng, caps)
                } else {
                    random_ringed_space_any(rng)
                };
                single_datum("*", &fiber).ok()
            }
            // A space under one of its own up-set charts.
            1 => {
                let space = if rng.chance(2, 3) {
                    random_ringed_space(rng, caps)
                } else {
                    random_ringed_space_any(rng)
                };
                let shape = Poset::new(&["m", "u"], &[("m", "u")]).expect("two point chain");
                let m = shape.index("m").expect("listed");
                let u = shape.index("u").expect("listed");
                let p = rng.below(space.shape().len());
                let inclusion = up_set_inclusion(&space, space.shape().up_set(p)).ok()?;
                let chart = inclusion.source().clone();
                let mut fibers = vec![space.clone(), space];
                fibers[u] = chart;
                LaxDatum::new(shape, fibers, BTreeMap::from([((m, u), inclusion)])).ok()
            }
            // Two up-set charts over one space.
            2 => {
                let space = if rng.chance(2, 3) {
                    random_ringed_space(rng, caps)
                } else {
                    random_ringed_space_any(rng)
                };
                let shape =
                    Poset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).expect("a vee");
                let n = space.shape().len();
                let (p, q) = (rng.below(n), rng.below(n));
                let inc_b = up_set_inclusion(&space, space.shape().up_set(p)).ok()?;
                let inc_c = up_set_inclusion(&space, space.shape().up_set(q)).ok()?;
                let fibers = vec![space.clone(), inc_b.source().clone(), inc_c.source().clone()];
                LaxDatum::new(
                    shape,
                    fibers,
                    BTreeMap::from([((0, 1), inc_b), ((0, 2), inc_c)]),
                )
                .ok()
            }
            // A chain of one-point fibers glued along pool arrows.
            3 => {
                let honest = rng.chance(2, 3);
                let shape =
                    Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).expect("a chain");
                let pool = ring_pool();
                let r0 = pool[rng.below(pool.len())].clone();
                let out0 = arrows_from(&r0, honest);
                let a01 = out0[rng.below(out0.len())].clone();
                let out1 = arrows_from(a01.dst(), honest);
                let a12 = out1[rng.below(out1.len())].clone();
                let fibers = vec![
                    CData::single("*", r0),
                    CData::single("*", a01.dst().clone()),
                    CData::single("*", a12.dst().clone()),
                ];
                let t01 = point_chart(&fibers[0], 0, a01.dst().clone(), a01).ok()?;
                let t12 = point_chart(&fibers[1], 0, a12.dst().clone(), a12).ok()?;
                LaxDatum::new(shape, fibers, BTreeMap::from([((0, 1), t01), ((1, 2), t12)])).ok()
            }
            // Two one-point fibers mapping into a shared upper chart.
            _ => {
                let honest = rng.chance(2, 3);
                let shape =
                    Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).expect("a wedge");
                let pool = ring_pool();
                let r0 = pool[rng.below(pool.len())].clone();
                let r1 = pool[rng.below(pool.len())].clone();
                let out0 = arrows_from(&r0, honest);
                let out1 = arrows_from(&r1, honest);
                let shared: Vec<&RingHom> = out0
                    .iter()
                    .filter(|a| out1.iter().any(|b| b.dst() == a.dst()))
                    .collect();
                let a0 = (*shared.get(rng.below(shared.len().max(1)))?).clone();
                let a1 = {
                    let fits: Vec<&RingHom> =
                        out1.iter().filter(|b| b.dst() == a0.dst()).collect();
                    (*fits.get(rng.below(fits.len().max(1)))?).clone()
                };
                let fibers = vec![
                    CData::single("*", r0),
                    CData::single("*", r1),
                    CData::single("*", a0.dst().clone()),
                ];
                let t02 = point_chart(&fibers[0], 0, a0.dst().clone(), a0).ok()?;
                let t12 = point_chart(&fibers[1], 0, a1.dst().clone(), a1).ok()?;
                LaxDatum::new(shape, fibers, BTreeMap::from([((0, 2), t02), ((1, 2), t12)])).ok()
            }
        })();
        if let Some(datum) = attempt {
            return datum;
        }
    }
}

pub fn ringed_lax_data(seed: u64, count: usize, caps: &Caps) -> Vec<LaxDatum<RingKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_ringed_datum(&mut rng, caps)).collect()
}

/// Random morphism of ringed lax families: identities and inclusions of
/// the family above a shape point.
pub fn random_ringed_lax_morphism(rng: &mut Rng, caps: &Caps) -> LaxDatumMorphism<RingKernel> {
    let datum = random_ringed_datum(rng, caps);
    if rng.chance(1, 2) {
        return LaxDatumMorphism::identity(&datum);
    }
    let p = rng.below(datum.index().len());
    let mask = datum.index().up_set(p);
    let (sub, kept) = datum.restrict_to_up_set(mask).expect("up-sets restrict");
    let shape_map = MonotoneMap::new(sub.index().clone(), datum.index().clone(), kept)
        .expect("an up-set embeds in order");
    let components = (0..sub.index().len())
        .map(|i| CDataMorphism::identity(sub.fiber(i)))
        .collect();
    LaxDatumMorphism::new(&sub, &datum, shape_map, components)
        .expect("restriction commutes with its own transitions")
}

pub fn ringed_lax_morphisms(
    seed: u64,
    count: usize,
    caps: &Caps,
) -> Vec<LaxDatumMorphism<RingKernel>> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| random_ringed_lax_morphism(&mut rng, caps)).collect()
}

/// The one-point space with stalk Z/6.
pub fn z6_point() -> RingedPoset {
    CData::single("*", zn(6))
}

/// The classic cover of the Z/6 point by its two residue fields.
pub fn z6_cover() -> (RingedPoset, Vec<RingedMorphism>) {
    let z6 = zn(6);
    let space = z6_point();
    let legs = vec![
        point_chart(&space, 0, zn(2), reduction(&z6, &zn(2))).expect("chart on the point"),
        point_chart(&space, 0, zn(3), reduction(&z6, &zn(3))).expect("chart on the point"),
    ];
    (space, legs)
}

/// Two-point chain with Z/6 below Z/2.
pub fn z6_chain() -> RingedPoset {
    let shape = Poset::new(&["lo", "hi"], &[("lo", "hi")]).expect("two point chain");
    let lo = shape.index("lo").expect("listed");
    let hi = shape.index("hi").expect("listed");
    let z6 = zn(6);
    let mut stalks = vec![z6.clone(), z6.clone()];
    stalks[hi] = zn(2);
    CData::new(shape, stalks, BTreeMap::from([((lo, hi), reduction(&z6, &zn(2)))]))
        .expect("a flat-epi chain glues")
}

/// Z/6 at the bottom with its two residue fields as incomparable tops.
pub fn z6_vee() -> RingedPoset {
    let shape =
        Poset::new(&["lo", "t2", "t3"], &[("lo", "t2"), ("lo", "t3")]).expect("a vee");
    let lo = shape.index("lo").expect("listed");
    let t2 = shape.index("t2").expect("listed");
    let t3 = shape.index("t3").expect("listed");
    let z6 = zn(6);
    let mut stalks = vec![z6.clone(), z6.clone(), z6.clone()];
    stalks[t2] = zn(2);
    stalks[t3] = zn(3);
    CData::new(
        shape,
        stalks,
        BTreeMap::from([
            ((lo, t2), reduction(&z6, &zn(2))),
            ((lo, t3), reduction(&z6, &zn(3))),
        ]),
    )
    .expect("a flat-epi vee glues")
}

/// Four-point model of the circle: two minimal points each below two
/// maximal ones. Its order complex is a square boundary.
pub fn circle_poset() -> Poset {
    Poset::new(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
        .expect("the circle model is a poset")
}

/// Two circle fibers joined over a point fiber; the cylinder is a wedge
/// of two circles up to homotopy.
pub fn wedge_datum() -> LaxDatum<FinSetKernel> {
    let shape = Poset::new(&["u", "v", "w"], &[("u", "w"), ("v", "w")]).expect("a vee");
    let u = shape.index("u").expect("listed");
    let v = shape.index("v").expect("listed");
    let w = shape.index("w").expect("listed");
    let circle = unit_stalks(&circle_poset());
    let point = unit_stalks(&Poset::point("pt"));
    let mut fibers = vec![circle.clone(), circle.clone(), circle.clone()];
    fibers[w] = point.clone();
    let pin = |target: &CData<FinSetKernel>, vertex: usize| {
        let base = MonotoneMap::new(point.shape().clone(), target.shape().clone(), vec![vertex])
            .expect("a constant map is monotone");
        CDataMorphism::new(&point, target, base, vec![SetMap::new(1, 1, vec![0]).expect("unit")])
            .expect("unit stalks accept any base")
    };
    let transitions = BTreeMap::from([
        ((u, w), pin(&circle, 0)),
        ((v, w), pin(&circle, 1)),
    ]);
    LaxDatum::new(shape, fibers, transitions).expect("the wedge family glues")
}
