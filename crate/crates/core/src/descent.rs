//! Set-valued geometric data and their descent comparisons.
//!
//! A datum assigns a finite set to every ringed poset and a function to
//! every morphism; "geometric" means qc-isomorphisms go to bijections.
//! Internal descent compares the datum's value on a space against the
//! colimit of its values on the stalks, glued through the up-set charts
//! U_x; external descent compares against the nerve-shaped colimit of a
//! cover. Both colimits are computed literally in finite sets.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::cdata::{CData, CDataMorphism};
use crate::kernel::{FinSetKernel, KernelColimits, KernelError, SetMap};
use crate::poset::MonotoneMap;
use crate::ring::{is_quasi_coherent_pair, FinModule, RingHom};
use crate::schematic::{
    induced_spec_map, is_qc_iso, nerve_datum, spec_space, RingedMorphism, RingedPoset,
    SchematicError,
};

/// Colimit of a finite-set diagram: class count plus, per node, the class
/// of each element. A thin wrapper over the kernel-level colimit.
struct SetColimit {
    class_of: Vec<Vec<usize>>,
    classes: usize,
}

fn set_colimit(
    sizes: &[usize],
    edges: &[(usize, usize, Vec<usize>)],
) -> Result<SetColimit, KernelError> {
    let arrows = edges
        .iter()
        .map(|(from, to, images)| {
            Ok((*from, *to, SetMap::new(sizes[*from], sizes[*to], images.clone())?))
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    let colim = FinSetKernel::colimit(sizes, &arrows)?;
    Ok(SetColimit {
        class_of: colim.legs.into_iter().map(|leg| leg.map).collect(),
        classes: colim.obj,
    })
}

/// A functorial assignment of finite sets to ringed posets. Values are
/// canonically numbered 0..card, so actions are plain image tables.
pub trait SetValuedDatum {
    fn name(&self) -> &str;

    /// Cardinality of the value set.
    fn value(&self, x: &RingedPoset, caps: &Caps) -> Result<usize, SchematicError>;

    /// The induced function on value sets, as images over 0..value(source).
    fn action(&self, f: &RingedMorphism, caps: &Caps) -> Result<Vec<usize>, SchematicError>;
}

/// Points of the glued chart spectrum. The finite shadow of the functor
/// sending a space to its associated locally ringed space.
pub struct SpecPts;

impl SetValuedDatum for SpecPts {
    fn name(&self) -> &str {
        "specpts"
    }

    fn value(&self, x: &RingedPoset, caps: &Caps) -> Result<usize, SchematicError> {
        Ok(spec_space(x, caps)?.len())
    }

    fn action(&self, f: &RingedMorphism, caps: &Caps) -> Result<Vec<usize>, SchematicError> {
        let source = spec_space(f.source(), caps)?;
        let target = spec_space(f.target(), caps)?;
        induced_spec_map(f, &source, &target)
    }
}

/// Number of points of the underlying poset. Deliberately not geometric:
/// qc-isomorphisms change chart counts.
pub struct ChartCount;

impl SetValuedDatum for ChartCount {
    fn name(&self) -> &str {
        "chartcount"
    }

    fn value(&self, x: &RingedPoset, _caps: &Caps) -> Result<usize, SchematicError> {
        Ok(x.len())
    }

    fn action(&self, f: &RingedMorphism, _caps: &Caps) -> Result<Vec<usize>, SchematicError> {
        Ok((0..f.source().len()).map(|x| f.base().apply(x)).collect())
    }
}

/// The data selectable by name from the command line.
pub fn builtin_datum(name: &str) -> Option<Box<dyn SetValuedDatum>> {
    match name {
        "specpts" => Some(Box::new(SpecPts)),
        "chartcount" => Some(Box::new(ChartCount)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricReport {
    pub verdict: bool,
    /// Samples that were qc-isomorphisms and so constrained the datum.
    pub checked: usize,
    /// Samples that were not qc-isomorphisms (vacuous for this test).
    pub skipped: usize,
    pub failures: Vec<String>,
}

fn is_bijection(images: &[usize], target_size: usize) -> bool {
    if images.len() != target_size {
        return false;
    }
    let mut seen = vec![false; target_size];
    for &y in images {
        if y >= target_size || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

/// Whether the datum sends each sampled qc-isomorphism to a bijection.
pub fn check_geometric(
    dat: &dyn SetValuedDatum,
    samples: &[RingedMorphism],
    caps: &Caps,
) -> Result<GeometricReport, SchematicError> {
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for (k, f) in samples.iter().enumerate() {
        if !is_qc_iso(f, caps)?.verdict {
            skipped += 1;
            continue;
        }
        checked += 1;
        let images = dat.action(f, caps)?;
        let target = dat.value(f.target(), caps)?;
        if !is_bijection(&images, target) {
            failures.push(format!(
                "sample {k}: {} sends a qc-isomorphism to a non-bijection ({} -> {})",
                dat.name(),
                images.len(),
                target
            ));
        }
    }
    Ok(GeometricReport { verdict: failures.is_empty(), checked, skipped, failures })
}

/// The up-set chart at a point together with its inclusion into the space.
fn up_set_inclusion(
    x: &RingedPoset,
    p: usize,
) -> Result<(RingedPoset, RingedMorphism), KernelError> {
    let (sub, kept) = x.restrict_to_up_set(x.shape().up_set(p))?;
    let base = MonotoneMap::new(sub.shape().clone(), x.shape().clone(), kept.clone())?;
    let co: Vec<RingHom> = kept.iter().map(|&g| RingHom::identity(x.stalk(g))).collect();
    let incl = CDataMorphism::new(&sub, x, base, co)?;
    Ok((sub, incl))
}

/// The single-point data at a stalk, labeled like the point it came from.
fn stalk_point(x: &RingedPoset, p: usize) -> RingedPoset {
    CData::single(x.shape().id(p), x.stalk(p).clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalDescentReport {
    pub verdict: bool,
    pub colimit_size: usize,
    pub value_size: usize,
    /// Whether every collapse U_x -> stalk point was a qc-isomorphism;
    /// the comparison map is only formed when this holds.
    pub left_legs_qc_iso: bool,
    pub details: Vec<String>,
}

/// Compares legs against the colimit classes: every class must carry one
/// consistent value and the induced map must be a bijection.
fn colimit_comparison(
    colim: &SetColimit,
    legs: &[Vec<usize>],
    value_size: usize,
    details: &mut Vec<String>,
) -> bool {
    let mut class_value: Vec<Option<usize>> = vec![None; colim.classes];
    let mut ok = true;
    for (n, leg) in legs.iter().enumerate() {
        for (e, &v) in leg.iter().enumerate() {
            let c = colim.class_of[n][e];
            match class_value[c] {
                None => class_value[c] = Some(v),
                Some(prev) if prev != v => {
                    details.push(format!(
                        "colimit class {c} receives two different values ({prev} and {v})"
                    ));
                    ok = false;
                }
                Some(_) => {}
            }
        }
    }
    if !ok {
        return false;
    }
    let mut hit = vec![false; value_size];
    for (c, v) in class_value.iter().enumerate() {
        let v = v.expect("every colimit class has a member");
        if v >= value_size || hit[v] {
            details.push(format!("value {v} is reached by more than one colimit class ({c})"));
            ok = false;
            continue;
        }
        hit[v] = true;
    }
    for (v, &h) in hit.iter().enumerate() {
        if !h {
            details.push(format!("value {v} is not reached by the comparison"));
            ok = false;
        }
    }
    ok
}

/// Whether the datum's value on `x` is the colimit of its stalk values,
/// identified along the zig-zags through the up-set charts.
pub fn check_internal_descent(
    dat: &dyn SetValuedDatum,
    x: &RingedPoset,
    caps: &Caps,
) -> Result<InternalDescentReport, SchematicError> {
    let n = x.len();
    let mut details = Vec::new();

    let mut sizes = Vec::with_capacity(n);
    for p in 0..n {
        sizes.push(dat.value(&stalk_point(x, p), caps)?);
    }
    let mut edges = Vec::new();
    for (p, q) in x.shape().related_pairs() {
        if p == q {
            continue;
        }
        // The stalk points map the other way: res(p, q) is the comorphism
        // of a point morphism from the q-stalk down to the p-stalk.
        let upper = stalk_point(x, q);
        let lower = stalk_point(x, p);
        let base = MonotoneMap::new(upper.shape().clone(), lower.shape().clone(), vec![0])?;
        let point_map = CDataMorphism::new(&upper, &lower, base, vec![x.res(p, q).clone()])?;
        edges.push((q, p, dat.action(&point_map, caps)?));
    }
    let colim = set_colimit(&sizes, &edges)?;
    let value_size = dat.value(x, caps)?;

    let mut left_legs_qc_iso = true;
    let mut legs: Vec<Vec<usize>> = Vec::with_capacity(n);
    for p in 0..n {
        let (chart, incl) = up_set_inclusion(x, p)?;
        let collapse = CDataMorphism::collapse_to_minimum(&chart)?;
        if !is_qc_iso(&collapse, caps)?.verdict {
            details.push(format!(
                "the collapse of the chart at {} to its stalk is not a qc-isomorphism",
                x.shape().id(p)
            ));
            left_legs_qc_iso = false;
            continue;
        }
        let down = dat.action(&collapse, caps)?;
        if !is_bijection(&down, sizes[p]) {
            details.push(format!(
                "{} does not invert the collapse at {} ({} -> {})",
                dat.name(),
                x.shape().id(p),
                down.len(),
                sizes[p]
            ));
            left_legs_qc_iso = false;
            continue;
        }
        let mut inv = vec![0usize; sizes[p]];
        for (i, &j) in down.iter().enumerate() {
            inv[j] = i;
        }
        let into = dat.action(&incl, caps)?;
        legs.push(inv.into_iter().map(|i| into[i]).collect());
    }
    if !left_legs_qc_iso {
        return Ok(InternalDescentReport {
            verdict: false,
            colimit_size: colim.classes,
            value_size,
            left_legs_qc_iso,
            details,
        });
    }

    let mut verdict = true;
    for (q, p, images) in &edges {
        for (e, &y) in images.iter().enumerate() {
            if legs[*p][y] != legs[*q][e] {
                details.push(format!(
                    "the stalk cocone does not commute over {} <= {}",
                    x.shape().id(*p),
                    x.shape().id(*q)
                ));
                verdict = false;
                break;
            }
        }
    }
    if verdict {
        verdict = colimit_comparison(&colim, &legs, value_size, &mut details);
    }
    Ok(InternalDescentReport {
        verdict,
        colimit_size: colim.classes,
        value_size,
        left_legs_qc_iso,
        details,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalDescentReport {
    pub verdict: bool,
    pub colimit_size: usize,
    pub value_size: usize,
    /// Datum values on the nerve fibers, in index-poset order.
    pub fiber_values: Vec<usize>,
    pub details: Vec<String>,
}

/// Whether the datum's value on the covered space is the nerve-shaped
/// colimit of its values on the chart overlaps.
pub fn check_external_descent(
    dat: &dyn SetValuedDatum,
    space: &RingedPoset,
    legs: &[RingedMorphism],
    caps: &Caps,
) -> Result<ExternalDescentReport, SchematicError> {
    let nerve = nerve_datum(space, legs, caps)?;
    let index = nerve.datum.index().clone();
    let mut details = Vec::new();

    let mut sizes = Vec::with_capacity(index.len());
    for k in 0..index.len() {
        sizes.push(dat.value(nerve.datum.fiber(k), caps)?);
    }
    let mut edges = Vec::new();
    for (p, q) in index.related_pairs() {
        if p == q {
            continue;
        }
        edges.push((q, p, dat.action(nerve.datum.transition(p, q), caps)?));
    }
    let colim = set_colimit(&sizes, &edges)?;
    let value_size = dat.value(space, caps)?;

    let mut cone: Vec<Vec<usize>> = Vec::with_capacity(index.len());
    for k in 0..index.len() {
        cone.push(dat.action(&nerve.fiber_augmentations[k], caps)?);
    }
    let mut verdict = true;
    for (q, p, images) in &edges {
        for (e, &y) in images.iter().enumerate() {
            if cone[*p][y] != cone[*q][e] {
                details.push(format!(
                    "the overlap cocone does not commute over {} <= {}",
                    index.id(*p),
                    index.id(*q)
                ));
                verdict = false;
                break;
            }
        }
    }
    if verdict {
        verdict = colimit_comparison(&colim, &cone, value_size, &mut details);
    }
    Ok(ExternalDescentReport {
        verdict,
        colimit_size: colim.classes,
        value_size,
        fiber_values: sizes,
        details,
    })
}

/// A module over every stalk plus a comparison map over every restriction.
#[derive(Clone, Debug)]
pub struct QcohFamily {
    space: RingedPoset,
    modules: Vec<FinModule>,
    carries: BTreeMap<(usize, usize), Vec<usize>>,
}

impl QcohFamily {
    /// Carries are required for every strictly related pair and must be
    /// additive and semilinear over the corresponding restriction.
    pub fn new(
        space: &RingedPoset,
        modules: Vec<FinModule>,
        carries: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<QcohFamily, SchematicError> {
        if modules.len() != space.len() {
            return Err(SchematicError::Kernel(KernelError::Structural(
                "one module per point is required".into(),
            )));
        }
        for (p, m) in modules.iter().enumerate() {
            if m.ring() != space.stalk(p) {
                return Err(SchematicError::Kernel(KernelError::Structural(format!(
                    "the module at {} is not over its stalk",
                    space.shape().id(p)
                ))));
            }
        }
        for (p, q) in space.shape().related_pairs() {
            if p == q {
                continue;
            }
            let carry = carries.get(&(p, q)).ok_or_else(|| {
                KernelError::Structural(format!(
                    "missing comparison map for {} <= {}",
                    space.shape().id(p),
                    space.shape().id(q)
                ))
            })?;
            let (mp, mq, res) = (&modules[p], &modules[q], space.res(p, q));
            if carry.len() != mp.order() || carry.iter().any(|&y| y >= mq.order()) {
                return Err(SchematicError::Kernel(KernelError::Structural(format!(
                    "comparison map for {} <= {} has the wrong shape",
                    space.shape().id(p),
                    space.shape().id(q)
                ))));
            }
            for a in 0..mp.order() {
                for b in 0..mp.order() {
                    if carry[mp.add(a, b)] != mq.add(carry[a], carry[b]) {
                        return Err(SchematicError::Kernel(KernelError::Structural(format!(
                            "comparison map for {} <= {} is not additive",
                            space.shape().id(p),
                            space.shape().id(q)
                        ))));
                    }
                }
                for r in 0..res.src().order() {
                    if carry[mp.act(r, a)] != mq.act(res.apply(r), carry[a]) {
                        return Err(SchematicError::Kernel(KernelError::Structural(format!(
                            "comparison map for {} <= {} is not semilinear",
                            space.shape().id(p),
                            space.shape().id(q)
                        ))));
                    }
                }
            }
        }
        Ok(QcohFamily { space: space.clone(), modules, carries })
    }

    /// The structure family: each stalk as a module over itself, compared
    /// along the restrictions.
    pub fn structure(space: &RingedPoset) -> Result<QcohFamily, SchematicError> {
        let modules = (0..space.len()).map(|p| FinModule::regular(space.stalk(p))).collect();
        let mut carries = BTreeMap::new();
        for (p, q) in space.shape().related_pairs() {
            if p == q {
                continue;
            }
            let res = space.res(p, q);
            carries.insert((p, q), (0..res.src().order()).map(|a| res.apply(a)).collect());
        }
        QcohFamily::new(space, modules, carries)
    }

    /// The zero family.
    pub fn zero(space: &RingedPoset) -> Result<QcohFamily, SchematicError> {
        let modules: Result<Vec<FinModule>, _> =
            (0..space.len()).map(|p| FinModule::from_ideal(space.stalk(p), &[0])).collect();
        let mut carries = BTreeMap::new();
        for (p, q) in space.shape().related_pairs() {
            if p == q {
                continue;
            }
            carries.insert((p, q), vec![0]);
        }
        QcohFamily::new(space, modules?, carries)
    }

    pub fn space(&self) -> &RingedPoset {
        &self.space
    }

    pub fn module(&self, p: usize) -> &FinModule {
        &self.modules[p]
    }

    /// The family induced on an up-closed set of points.
    pub fn restrict_to_up_set(&self, mask: u64) -> Result<QcohFamily, SchematicError> {
        let (sub, kept) = self.space.restrict_to_up_set(mask)?;
        let local: BTreeMap<usize, usize> =
            kept.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let modules = kept.iter().map(|&g| self.modules[g].clone()).collect();
        let mut carries = BTreeMap::new();
        for (&(x, y), carry) in &self.carries {
            if let (Some(&lx), Some(&ly)) = (local.get(&x), local.get(&y)) {
                carries.insert((lx, ly), carry.clone());
            }
        }
        QcohFamily::new(&sub, modules, carries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcohReport {
    pub verdict: bool,
    pub failures: Vec<String>,
}

/// Whether every comparison exhibits the upper module as the base change
/// of the lower one along the restriction.
pub fn is_quasi_coherent(fam: &QcohFamily, caps: &Caps) -> Result<QcohReport, SchematicError> {
    let space = &fam.space;
    let mut failures = Vec::new();
    for (p, q) in space.shape().related_pairs() {
        if p == q {
            continue;
        }
        let ok = is_quasi_coherent_pair(
            &fam.modules[p],
            space.res(p, q),
            &fam.modules[q],
            &fam.carries[&(p, q)],
            caps,
        )?;
        if !ok {
            failures.push(format!(
                "the comparison for {} <= {} is not an isomorphism",
                space.shape().id(p),
                space.shape().id(q)
            ));
        }
    }
    Ok(QcohReport { verdict: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;
    use crate::ring::{zn, FinRing};

    fn caps() -> Caps {
        Caps::default()
    }

    fn mod_map(src: &FinRing, dst: &FinRing) -> RingHom {
        let mut map = vec![0usize; src.order()];
        let mut acc_src = src.zero();
        let mut acc_dst = dst.zero();
        for _ in 0..src.order() {
            map[acc_src] = acc_dst;
            acc_src = src.add(acc_src, src.one());
            acc_dst = dst.add(acc_dst, dst.one());
        }
        RingHom::new(src.clone(), dst.clone(), map).expect("reduction is a ring hom")
    }

    fn point_space(r: FinRing) -> RingedPoset {
        CData::single("*", r)
    }

    fn chain_data(bottom: FinRing, top: FinRing, map: RingHom) -> RingedPoset {
        let shape = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = shape.index("lo").unwrap();
        let hi = shape.index("hi").unwrap();
        let stalks = if lo < hi { vec![bottom, top] } else { vec![top, bottom] };
        CData::new(shape, stalks, BTreeMap::from([((lo, hi), map)])).unwrap()
    }

    fn z6_chain() -> RingedPoset {
        chain_data(zn(6), zn(2), mod_map(&zn(6), &zn(2)))
    }

    fn chart_inclusion(chart: FinRing, space: &RingedPoset, co: RingHom) -> RingedMorphism {
        let source = point_space(chart);
        let base =
            MonotoneMap::new(source.shape().clone(), space.shape().clone(), vec![0]).unwrap();
        CDataMorphism::new(&source, space, base, vec![co]).unwrap()
    }

    fn z6_cover_legs(space: &RingedPoset) -> Vec<RingedMorphism> {
        let z6 = zn(6);
        vec![
            chart_inclusion(zn(2), space, mod_map(&z6, &zn(2))),
            chart_inclusion(zn(3), space, mod_map(&z6, &zn(3))),
        ]
    }

    #[test]
    fn colimit_of_a_span_with_empty_apex() {
        assert_eq!(set_colimit(&[1, 1, 0], &[]).unwrap().classes, 2);
    }

    #[test]
    fn colimit_coequalizes_parallel_functions() {
        let edges = [(0, 1, vec![0]), (0, 1, vec![1])];
        let colim = set_colimit(&[1, 2], &edges).unwrap();
        assert_eq!(colim.classes, 1);
        assert_eq!(colim.class_of[1][0], colim.class_of[1][1]);
    }

    #[test]
    fn colimit_rejects_a_partial_edge() {
        assert!(set_colimit(&[2, 1], &[(0, 1, vec![0])]).is_err());
    }

    #[test]
    fn specpts_counts_chart_spectra() {
        assert_eq!(SpecPts.value(&point_space(zn(6)), &caps()).unwrap(), 2);
        assert_eq!(SpecPts.value(&point_space(crate::ring::zero_ring()), &caps()).unwrap(), 0);
        assert_eq!(SpecPts.value(&z6_chain(), &caps()).unwrap(), 2);
    }

    #[test]
    fn specpts_is_geometric_on_collapses() {
        let chain = z6_chain();
        let samples = vec![
            CDataMorphism::collapse_to_minimum(&chain).unwrap(),
            CDataMorphism::identity(&chain),
        ];
        let report = check_geometric(&SpecPts, &samples, &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.checked, report.skipped), (2, 0));
    }

    #[test]
    fn chart_count_fails_the_geometric_test() {
        let chain = z6_chain();
        let samples = vec![CDataMorphism::collapse_to_minimum(&chain).unwrap()];
        let report = check_geometric(&ChartCount, &samples, &caps()).unwrap();
        assert!(!report.verdict);
        assert!(report.failures[0].contains("(2 -> 1)"));
    }

    #[test]
    fn non_qc_iso_samples_are_vacuous() {
        let space = point_space(zn(6));
        let leg = chart_inclusion(zn(2), &space, mod_map(&zn(6), &zn(2)));
        let report = check_geometric(&ChartCount, &[leg], &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.checked, report.skipped), (0, 1));
    }

    #[test]
    fn builtin_data_by_name() {
        assert_eq!(builtin_datum("specpts").unwrap().name(), "specpts");
        assert_eq!(builtin_datum("chartcount").unwrap().name(), "chartcount");
        assert!(builtin_datum("qcoh").is_none());
    }

    #[test]
    fn internal_descent_on_a_point_is_the_identity_comparison() {
        let report = check_internal_descent(&SpecPts, &point_space(zn(6)), &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
    }

    #[test]
    fn internal_descent_glues_the_chain_spectrum() {
        let report = check_internal_descent(&SpecPts, &z6_chain(), &caps()).unwrap();
        assert!(report.verdict);
        assert!(report.left_legs_qc_iso);
        // 2 stalk primes below, 1 above, fused to 2 classes.
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
    }

    #[test]
    fn internal_descent_on_the_z6_nerve_cylinder() {
        let space = point_space(zn(6));
        let nerve = nerve_datum(&space, &z6_cover_legs(&space), &caps()).unwrap();
        let report = check_internal_descent(&SpecPts, &nerve.cylinder.data, &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
    }

    #[test]
    fn chart_count_cannot_invert_the_collapse() {
        let report = check_internal_descent(&ChartCount, &z6_chain(), &caps()).unwrap();
        assert!(!report.verdict);
        assert!(!report.left_legs_qc_iso);
        assert!(report.details[0].contains("does not invert the collapse"));
    }

    #[test]
    fn external_descent_for_the_z6_cover() {
        let space = point_space(zn(6));
        let report =
            check_external_descent(&SpecPts, &space, &z6_cover_legs(&space), &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
        // Fibers in index order "0" < "0+1" < "1": two points and an
        // empty overlap.
        assert_eq!(report.fiber_values, vec![1, 0, 1]);
    }

    #[test]
    fn external_descent_for_the_trivial_cover() {
        let chain = z6_chain();
        let legs = vec![CDataMorphism::identity(&chain)];
        let report = check_external_descent(&SpecPts, &chain, &legs, &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
        assert_eq!(report.fiber_values, vec![2]);
    }

    #[test]
    fn external_descent_collapses_a_redundant_cover() {
        let z6 = zn(6);
        let space = point_space(z6.clone());
        let legs = vec![
            chart_inclusion(zn(2), &space, mod_map(&z6, &zn(2))),
            chart_inclusion(z6.clone(), &space, RingHom::identity(&z6)),
        ];
        let report = check_external_descent(&SpecPts, &space, &legs, &caps()).unwrap();
        assert!(report.verdict);
        assert_eq!((report.colimit_size, report.value_size), (2, 2));
        assert_eq!(report.fiber_values, vec![1, 1, 2]);
    }

    #[test]
    fn structure_family_is_quasi_coherent() {
        let fam = QcohFamily::structure(&z6_chain()).unwrap();
        assert!(is_quasi_coherent(&fam, &caps()).unwrap().verdict);
    }

    #[test]
    fn zero_family_is_quasi_coherent() {
        let fam = QcohFamily::zero(&z6_chain()).unwrap();
        assert!(is_quasi_coherent(&fam, &caps()).unwrap().verdict);
    }

    #[test]
    fn zero_comparison_on_mismatched_modules_is_not_quasi_coherent() {
        let chain = z6_chain();
        let lo = chain.shape().index("lo").unwrap();
        let hi = chain.shape().index("hi").unwrap();
        let mut modules = vec![FinModule::regular(chain.stalk(0)); 2];
        // The ideal (2) of Z/6 is Z/3 as a module; Z/3 (x)_{Z/6} Z/2 = 0.
        modules[lo] = FinModule::from_ideal(chain.stalk(lo), &[0, 2, 4]).unwrap();
        modules[hi] = FinModule::regular(chain.stalk(hi));
        let carries = BTreeMap::from([((lo, hi), vec![0, 0, 0])]);
        let fam = QcohFamily::new(&chain, modules, carries).unwrap();
        let report = is_quasi_coherent(&fam, &caps()).unwrap();
        assert!(!report.verdict);
        assert!(report.failures[0].contains("lo <= hi"));
    }

    #[test]
    fn family_constructor_rejects_a_non_semilinear_carry() {
        let chain = z6_chain();
        let lo = chain.shape().index("lo").unwrap();
        let hi = chain.shape().index("hi").unwrap();
        let mut modules = vec![FinModule::regular(chain.stalk(0)); 2];
        modules[lo] = FinModule::regular(chain.stalk(lo));
        modules[hi] = FinModule::regular(chain.stalk(hi));
        // Sends 1 to 1 but 2 to 1: not additive.
        let carries = BTreeMap::from([((lo, hi), vec![0, 1, 1, 0, 1, 1])]);
        assert!(QcohFamily::new(&chain, modules, carries).is_err());
    }

    #[test]
    fn quasi_coherence_survives_restriction() {
        let chain = z6_chain();
        let hi = chain.shape().index("hi").unwrap();
        let fam = QcohFamily::structure(&chain).unwrap();
        let upper = fam.restrict_to_up_set(chain.shape().up_set(hi)).unwrap();
        assert!(is_quasi_coherent(&upper, &caps()).unwrap().verdict);
        assert_eq!(upper.space().len(), 1);
    }
}
