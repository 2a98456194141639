//! Schematic verdicts for ringed posets: flat-epi restriction checks, the
//! finite spectrum space, qc-isomorphisms, nerves of covers, and the
//! cylinder criteria that reduce gluing questions to chart-pair checks.
//!
//! A ringed poset is data over the ring kernel. "Schematic" asks that every
//! restriction is flat and that for each t <= x, y the chart overlap map
//! O_x (x)_{O_t} O_y -> prod_{z >= x, y} O_z is faithfully flat; the weaker
//! "pseudo-schematic" asks only for flat epimorphism restrictions, which is
//! exactly what makes the chart spectra glue into a well-defined point set.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::cdata::{fibered_product, CData, CDataMorphism};
use crate::cylinder::{
    cylinder, cylinder_map, glue_fiber_maps, Cylinder, LaxDatum, LaxDatumMorphism,
};
use crate::kernel::{KernelError, RingKernel};
use crate::poset::{nonempty_subsets_poset, PosetError};
use crate::ring::{
    find_ring_iso, flat_witness, hom_into_product, is_epi, is_faithfully_flat,
    is_spec_surjective, localize_at_prime, product_many, tensor_rings, zero_ring, FinRing,
    Ideal, RingError, RingHom,
};

pub type RingedPoset = CData<RingKernel>;
pub type RingedMorphism = CDataMorphism<RingKernel>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchematicError {
    Kernel(KernelError),
    /// The spectrum space needs flat epimorphism restrictions to glue.
    NotPseudoSchematic(String),
    /// A fused spectrum class whose chart localizations fail to agree;
    /// impossible under flat-epi restrictions, so this flags a real bug
    /// in the input rather than a borderline verdict.
    LocalRingMismatch(String),
    /// A nerve was requested over a leg that is not a flat immersion.
    NotAFlatImmersion { leg: usize, detail: String },
}

impl From<KernelError> for SchematicError {
    fn from(e: KernelError) -> Self {
        SchematicError::Kernel(e)
    }
}
impl From<RingError> for SchematicError {
    fn from(e: RingError) -> Self {
        SchematicError::Kernel(KernelError::Ring(e))
    }
}
impl From<PosetError> for SchematicError {
    fn from(e: PosetError) -> Self {
        SchematicError::Kernel(KernelError::Poset(e))
    }
}

impl core::fmt::Display for SchematicError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SchematicError::Kernel(e) => write!(f, "{e}"),
            SchematicError::NotPseudoSchematic(d) => {
                write!(f, "space is not pseudo-schematic: {d}")
            }
            SchematicError::LocalRingMismatch(d) => {
                write!(f, "local rings disagree across a spectrum class: {d}")
            }
            SchematicError::NotAFlatImmersion { leg, detail } => {
                write!(f, "cover leg {leg} is not a flat immersion: {detail}")
            }
        }
    }
}

/// Verdict plus human-readable witnesses for whichever checks failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchematicReport {
    pub verdict: bool,
    pub failures: Vec<String>,
}

impl SchematicReport {
    fn from_failures(failures: Vec<String>) -> SchematicReport {
        SchematicReport { verdict: failures.is_empty(), failures }
    }
}

fn flat_failures(x: &RingedPoset, caps: &Caps) -> Result<Vec<String>, SchematicError> {
    let mut failures = Vec::new();
    for (a, b) in x.shape().related_pairs() {
        if a == b {
            continue;
        }
        if let Some(witness) = flat_witness(x.res(a, b), caps)? {
            failures.push(format!(
                "restriction {} <= {} is not flat (ideal {:?} loses elements under tensor)",
                x.shape().id(a),
                x.shape().id(b),
                witness
            ));
        }
    }
    Ok(failures)
}

/// Flat epimorphism restrictions: the entry ticket for spectrum gluing.
pub fn is_pseudo_schematic(
    x: &RingedPoset,
    caps: &Caps,
) -> Result<SchematicReport, SchematicError> {
    let mut failures = flat_failures(x, caps)?;
    for (a, b) in x.shape().related_pairs() {
        if a == b {
            continue;
        }
        if !is_epi(x.res(a, b), caps)? {
            failures.push(format!(
                "restriction {} <= {} is not an epimorphism",
                x.shape().id(a),
                x.shape().id(b)
            ));
        }
    }
    Ok(SchematicReport::from_failures(failures))
}

/// Product of chart stalks, refused outright when the result would exceed
/// the ring cap; the tables alone would cost order^2 work to build.
fn capped_product(
    factors: &[FinRing],
    caps: &Caps,
) -> Result<(FinRing, Vec<RingHom>), SchematicError> {
    let total: u128 = factors.iter().map(|f| f.order() as u128).product();
    if total > caps.ring_order as u128 {
        return Err(SchematicError::Kernel(KernelError::SizeCapExceeded {
            what: "chart product order",
            size: total.min(usize::MAX as u128) as usize,
            cap: caps.ring_order,
        }));
    }
    Ok(product_many(factors))
}

/// The canonical map O_a (x)_{O_t} O_b -> prod over the common upper charts.
/// With no common upper chart the product is the zero ring.
fn overlap_map(
    x: &RingedPoset,
    t: usize,
    a: usize,
    b: usize,
    caps: &Caps,
) -> Result<RingHom, SchematicError> {
    let shape = x.shape();
    let tensor = tensor_rings(x.res(t, a), x.res(t, b), caps)?;
    let uppers: Vec<usize> =
        (0..shape.len()).filter(|&z| shape.leq(a, z) && shape.leq(b, z)).collect();
    if uppers.is_empty() {
        let src = tensor.ring().clone();
        let order = src.order();
        return Ok(RingHom::new(src, zero_ring(), vec![0; order])?);
    }
    let factors: Vec<FinRing> = uppers.iter().map(|&z| x.stalk(z).clone()).collect();
    let (product, projections) = capped_product(&factors, caps)?;
    let legs: Vec<RingHom> = uppers
        .iter()
        .map(|&z| tensor.induce(x.res(a, z), x.res(b, z)))
        .collect::<Result<_, _>>()?;
    Ok(hom_into_product(&product, &projections, &legs)?)
}

/// Restrictions flat, and every chart overlap map faithfully flat.
pub fn is_schematic(x: &RingedPoset, caps: &Caps) -> Result<SchematicReport, SchematicError> {
    let mut failures = flat_failures(x, caps)?;
    let shape = x.shape();
    for t in 0..shape.len() {
        let over: Vec<usize> = shape.up_set_vec(t);
        for (i, &a) in over.iter().enumerate() {
            for &b in &over[i..] {
                let canonical = overlap_map(x, t, a, b, caps)?;
                if !is_faithfully_flat(&canonical, caps)? {
                    failures.push(format!(
                        "overlap of {} and {} over {} is not faithfully flat onto its upper charts",
                        shape.id(a),
                        shape.id(b),
                        shape.id(t)
                    ));
                }
            }
        }
    }
    Ok(SchematicReport::from_failures(failures))
}

/// For every x and y >= f(x): the map O_x (x)_{O_{f(x)}} O_y into the
/// product over U_x intersected with the preimage of U_y must hit every
/// prime of the tensor.
pub fn is_schematic_morphism(
    f: &RingedMorphism,
    caps: &Caps,
) -> Result<SchematicReport, SchematicError> {
    let mut failures = Vec::new();
    let xs = f.source().shape();
    let ys = f.target().shape();
    for x in 0..xs.len() {
        let fx = f.base().apply(x);
        for y in 0..ys.len() {
            if !ys.leq(fx, y) {
                continue;
            }
            let tensor = tensor_rings(f.co(x), f.target().res(fx, y), caps)?;
            let zs: Vec<usize> = (0..xs.len())
                .filter(|&z| xs.leq(x, z) && ys.leq(y, f.base().apply(z)))
                .collect();
            let canonical = if zs.is_empty() {
                let src = tensor.ring().clone();
                let order = src.order();
                RingHom::new(src, zero_ring(), vec![0; order])?
            } else {
                let factors: Vec<FinRing> =
                    zs.iter().map(|&z| f.source().stalk(z).clone()).collect();
                let (product, projections) = capped_product(&factors, caps)?;
                let legs: Vec<RingHom> = zs
                    .iter()
                    .map(|&z| {
                        let on_right =
                            f.co(z).compose(f.target().res(y, f.base().apply(z)))?;
                        tensor.induce(f.source().res(x, z), &on_right)
                    })
                    .collect::<Result<_, _>>()?;
                hom_into_product(&product, &projections, &legs)?
            };
            if !is_spec_surjective(&canonical) {
                failures.push(format!(
                    "primes of the overlap tensor at {} over {} are not all reached",
                    xs.id(x),
                    ys.id(y)
                ));
            }
        }
    }
    Ok(SchematicReport::from_failures(failures))
}

/// One point of the glued spectrum: the chart primes it identifies and the
/// common local ring (taken at the smallest member, the rest verified
/// isomorphic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecPoint {
    pub members: Vec<(usize, Ideal)>,
    pub local_ring: FinRing,
}

/// The colimit of the chart spectra along restriction contractions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecSpace {
    pub points: Vec<SpecPoint>,
}

impl SpecSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The class containing a given chart prime.
    pub fn class_of(&self, chart: usize, prime: &[usize]) -> Option<usize> {
        self.points
            .iter()
            .position(|p| p.members.iter().any(|(c, q)| *c == chart && q == prime))
    }
}

fn uf_find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn uf_union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (uf_find(parent, a), uf_find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Disjoint union of the chart spectra, modulo identifying each prime with
/// its contraction along every restriction. Requires flat epimorphism
/// restrictions; those make the identified localizations isomorphic, which
/// is re-verified rather than trusted.
pub fn spec_space(x: &RingedPoset, caps: &Caps) -> Result<SpecSpace, SchematicError> {
    let pre = is_pseudo_schematic(x, caps)?;
    if !pre.verdict {
        return Err(SchematicError::NotPseudoSchematic(pre.failures.join("; ")));
    }
    let chart_primes: Vec<Vec<Ideal>> =
        (0..x.len()).map(|i| x.stalk(i).prime_ideals()).collect();
    let mut offset = vec![0usize; x.len() + 1];
    for i in 0..x.len() {
        offset[i + 1] = offset[i] + chart_primes[i].len();
    }
    let total = offset[x.len()];
    let mut parent: Vec<usize> = (0..total).collect();
    for (a, b) in x.shape().related_pairs() {
        if a == b {
            continue;
        }
        let r = x.res(a, b);
        for (qi, q) in chart_primes[b].iter().enumerate() {
            let contracted = r.preimage_ideal(q);
            let pi = chart_primes[a].iter().position(|p| *p == contracted).ok_or_else(|| {
                KernelError::Structural(format!(
                    "contraction of a prime of {} is not prime in {}",
                    x.shape().id(b),
                    x.shape().id(a)
                ))
            })?;
            uf_union(&mut parent, offset[a] + pi, offset[b] + qi);
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..total {
        let root = uf_find(&mut parent, i);
        classes.entry(root).or_default().push(i);
    }
    let mut points = Vec::with_capacity(classes.len());
    for group in classes.values() {
        let members: Vec<(usize, Ideal)> = group
            .iter()
            .map(|&g| {
                let chart = offset.partition_point(|&o| o <= g) - 1;
                (chart, chart_primes[chart][g - offset[chart]].clone())
            })
            .collect();
        let (rep_chart, rep_prime) = &members[0];
        let (local_ring, _) = localize_at_prime(x.stalk(*rep_chart), rep_prime)?;
        for (chart, prime) in members.iter().skip(1) {
            let (other, _) = localize_at_prime(x.stalk(*chart), prime)?;
            if find_ring_iso(&local_ring, &other, caps)?.is_none() {
                return Err(SchematicError::LocalRingMismatch(format!(
                    "chart {} at {:?} vs chart {} at {:?}",
                    x.shape().id(*rep_chart),
                    rep_prime,
                    x.shape().id(*chart),
                    prime
                )));
            }
        }
        points.push(SpecPoint { members, local_ring });
    }
    Ok(SpecSpace { points })
}

/// The map of spectrum classes induced by contracting primes along the
/// comorphisms. Well-definedness across each fused class is re-checked.
pub fn induced_spec_map(
    f: &RingedMorphism,
    source: &SpecSpace,
    target: &SpecSpace,
) -> Result<Vec<usize>, SchematicError> {
    let mut out = Vec::with_capacity(source.points.len());
    for point in &source.points {
        let mut image: Option<usize> = None;
        for (chart, prime) in &point.members {
            let contracted = f.co(*chart).preimage_ideal(prime);
            let class = target
                .class_of(f.base().apply(*chart), &contracted)
                .ok_or_else(|| {
                    KernelError::Structural(
                        "contracted prime missing from the target spectrum".into(),
                    )
                })?;
            match image {
                None => image = Some(class),
                Some(prev) if prev != class => {
                    return Err(SchematicError::Kernel(KernelError::Structural(
                        "a fused spectrum class has two different images".into(),
                    )))
                }
                Some(_) => {}
            }
        }
        out.push(image.expect("spectrum classes are nonempty"));
    }
    Ok(out)
}

/// Verdict of the spectrum-level isomorphism test, with point counts for
/// reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcIsoReport {
    pub verdict: bool,
    pub source_points: usize,
    pub target_points: usize,
    pub failures: Vec<String>,
}

/// Induced spectrum map bijective with isomorphic local rings. Finite rings
/// are Artinian, so the spectra are discrete and there is no extra topology
/// to compare.
pub fn is_qc_iso(f: &RingedMorphism, caps: &Caps) -> Result<QcIsoReport, SchematicError> {
    let source = spec_space(f.source(), caps)?;
    let target = spec_space(f.target(), caps)?;
    let map = induced_spec_map(f, &source, &target)?;
    let mut failures = Vec::new();
    let mut hit = vec![false; target.points.len()];
    for (i, &c) in map.iter().enumerate() {
        if hit[c] {
            failures.push(format!("two spectrum points land on target class {c}"));
        }
        hit[c] = true;
        if find_ring_iso(&source.points[i].local_ring, &target.points[c].local_ring, caps)?
            .is_none()
        {
            failures.push(format!("local rings differ over target class {c}"));
        }
    }
    for (c, covered) in hit.iter().enumerate() {
        if !covered {
            failures.push(format!(
                "target class {c} (chart {}, prime {:?}) is not reached",
                f.target().shape().id(target.points[c].members[0].0),
                target.points[c].members[0].1
            ));
        }
    }
    Ok(QcIsoReport {
        verdict: failures.is_empty(),
        source_points: source.points.len(),
        target_points: target.points.len(),
        failures,
    })
}

fn comorphism_flat_failures(
    f: &RingedMorphism,
    caps: &Caps,
) -> Result<Vec<String>, SchematicError> {
    let mut failures = Vec::new();
    for x in 0..f.source().len() {
        if let Some(witness) = flat_witness(f.co(x), caps)? {
            failures.push(format!(
                "comorphism at {} is not flat (witness ideal {:?})",
                f.source().shape().id(x),
                witness
            ));
        }
    }
    Ok(failures)
}

/// Flat comorphisms plus a diagonal that is a qc-isomorphism onto the self
/// fibered product; the poset analogue of a flat monomorphism.
pub fn is_flat_immersion(
    f: &RingedMorphism,
    caps: &Caps,
) -> Result<SchematicReport, SchematicError> {
    let mut failures = comorphism_flat_failures(f, caps)?;
    if failures.is_empty() {
        let fp = fibered_product(f, f, caps)?;
        let id = CDataMorphism::identity(f.source());
        let diagonal = fp.pair(&id, &id)?;
        let qc = is_qc_iso(&diagonal, caps)?;
        if !qc.verdict {
            failures.push(format!(
                "diagonal is not a qc-isomorphism: {}",
                qc.failures.join("; ")
            ));
        }
    }
    Ok(SchematicReport::from_failures(failures))
}

/// Flat comorphisms plus a surjective induced spectrum map.
pub fn is_faithfully_flat_morphism(
    f: &RingedMorphism,
    caps: &Caps,
) -> Result<SchematicReport, SchematicError> {
    let mut failures = comorphism_flat_failures(f, caps)?;
    let source = spec_space(f.source(), caps)?;
    let target = spec_space(f.target(), caps)?;
    let map = induced_spec_map(f, &source, &target)?;
    let mut hit = vec![false; target.points.len()];
    for &c in &map {
        hit[c] = true;
    }
    for (c, covered) in hit.iter().enumerate() {
        if !covered {
            failures.push(format!(
                "target class {c} (chart {}, prime {:?}) is not reached",
                f.target().shape().id(target.points[c].members[0].0),
                target.points[c].members[0].1
            ));
        }
    }
    Ok(SchematicReport::from_failures(failures))
}

/// The nerve of a cover: fibers are iterated fibered products of the charts
/// over the covered space, indexed by nonempty subsets ordered backwards by
/// inclusion depth (singletons minimal), with projection transitions.
pub struct Nerve {
    pub datum: LaxDatum<RingKernel>,
    /// members[k]: which cover legs the k-th index point intersects.
    pub members: Vec<Vec<usize>>,
    /// Per-fiber maps U(members[k]) -> X.
    pub fiber_augmentations: Vec<RingedMorphism>,
    pub cylinder: Cylinder<RingKernel>,
    /// The glued map Cyl(nerve) -> X.
    pub augmentation: RingedMorphism,
}

/// All charts of a subset, paired off one at a time in ascending index
/// order; `projections[i]` recovers the chart legs.
struct NerveLevel {
    object: RingedPoset,
    augmentation: RingedMorphism,
    projections: BTreeMap<usize, RingedMorphism>,
    product: Option<crate::cdata::FiberedProduct<RingKernel>>,
}

fn into_fiber(
    sub: &[usize],
    levels: &[NerveLevel],
    index_of: &BTreeMap<Vec<usize>, usize>,
    from: &NerveLevel,
) -> Result<RingedMorphism, SchematicError> {
    let k = index_of[sub];
    if sub.len() == 1 {
        return Ok(from.projections[&sub[0]].clone());
    }
    let (last, prefix) = sub.split_last().expect("nonempty subset");
    let w_left = into_fiber(prefix, levels, index_of, from)?;
    let w_right = from.projections[last].clone();
    let fp = levels[k].product.as_ref().expect("composite fibers carry their product");
    Ok(fp.pair(&w_left, &w_right)?)
}

pub fn nerve_datum(
    space: &RingedPoset,
    legs: &[RingedMorphism],
    caps: &Caps,
) -> Result<Nerve, SchematicError> {
    if legs.is_empty() {
        return Err(SchematicError::Kernel(KernelError::Structural(
            "a cover needs at least one chart".into(),
        )));
    }
    for (i, leg) in legs.iter().enumerate() {
        if leg.target() != space {
            return Err(SchematicError::Kernel(KernelError::Structural(format!(
                "cover leg {i} does not land in the covered space"
            ))));
        }
        let report = is_flat_immersion(leg, caps)?;
        if !report.verdict {
            return Err(SchematicError::NotAFlatImmersion {
                leg: i,
                detail: report.failures.join("; "),
            });
        }
    }
    let labels: Vec<String> = (0..legs.len()).map(|i| i.to_string()).collect();
    let subsets = nonempty_subsets_poset(&labels)?;
    let shape = subsets.poset;
    let members = subsets.members;
    let index_of: BTreeMap<Vec<usize>, usize> =
        members.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
    let mut build_order: Vec<usize> = (0..shape.len()).collect();
    build_order.sort_by_key(|&k| (members[k].len(), members[k].clone()));
    let mut levels: Vec<Option<NerveLevel>> = (0..shape.len()).map(|_| None).collect();
    for &k in &build_order {
        let mem = &members[k];
        let level = if let [single] = mem[..] {
            NerveLevel {
                object: legs[single].source().clone(),
                augmentation: legs[single].clone(),
                projections: BTreeMap::from([(
                    single,
                    CDataMorphism::identity(legs[single].source()),
                )]),
                product: None,
            }
        } else {
            let (last, prefix) = mem.split_last().expect("nonempty subset");
            let prev = levels[index_of[prefix]].as_ref().expect("prefix is built first");
            let fp = fibered_product(&prev.augmentation, &legs[*last], caps)?;
            let mut projections = BTreeMap::new();
            for (&i, proj) in &prev.projections {
                projections.insert(i, proj.compose(&fp.to_left)?);
            }
            projections.insert(*last, fp.to_right.clone());
            NerveLevel {
                object: fp.object.clone(),
                augmentation: legs[*last].compose(&fp.to_right)?,
                projections,
                product: Some(fp),
            }
        };
        levels[k] = Some(level);
    }
    let levels: Vec<NerveLevel> = levels.into_iter().map(Option::unwrap).collect();
    let mut given = BTreeMap::new();
    for (a, b) in shape.covers() {
        given.insert((a, b), into_fiber(&members[a], &levels, &index_of, &levels[b])?);
    }
    let fibers: Vec<RingedPoset> = levels.iter().map(|l| l.object.clone()).collect();
    let datum = LaxDatum::new(shape, fibers, given)?;
    let cyl = cylinder(&datum)?;
    let fiber_augmentations: Vec<RingedMorphism> =
        levels.into_iter().map(|l| l.augmentation).collect();
    let augmentation = glue_fiber_maps(&cyl, &fiber_augmentations, space)?;
    Ok(Nerve { datum, members, fiber_augmentations, cylinder: cyl, augmentation })
}

/// Hypothesis-vs-conclusion record for the cylinder criteria. The checks
/// assert only the forward direction: when every hypothesis field holds,
/// the conclusion must.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderTheoremReport {
    pub fibers_schematic: bool,
    pub transitions_flat_immersions: bool,
    pub projections_qc_iso: bool,
    pub hypothesis: bool,
    pub conclusion: Option<bool>,
    pub implication_ok: bool,
    pub details: Vec<String>,
}

/// The projection from the cylinder over the common up-set of p and q to
/// the fibered product of the two charts over the fiber at t.
fn overlap_projection(
    x: &LaxDatum<RingKernel>,
    t: usize,
    p: usize,
    q: usize,
    caps: &Caps,
) -> Result<RingedMorphism, SchematicError> {
    let index = x.index();
    let mask = index.up_set(p) & index.up_set(q);
    let (restricted, kept) = x.restrict_to_up_set(mask)?;
    let cyl = cylinder(&restricted)?;
    let legs_p: Vec<RingedMorphism> =
        kept.iter().map(|&r| x.transition(p, r).clone()).collect();
    let legs_q: Vec<RingedMorphism> =
        kept.iter().map(|&r| x.transition(q, r).clone()).collect();
    let to_p = glue_fiber_maps(&cyl, &legs_p, x.fiber(p))?;
    let to_q = glue_fiber_maps(&cyl, &legs_q, x.fiber(q))?;
    let fp = fibered_product(x.transition(t, p), x.transition(t, q), caps)?;
    Ok(fp.pair(&to_p, &to_q)?)
}

/// Runs a qc-isomorphism check whose failure (including a source or target
/// that is not even pseudo-schematic) counts against the hypothesis rather
/// than aborting the report. Size-cap and structural errors still abort.
fn qc_check(
    result: Result<QcIsoReport, SchematicError>,
    label: String,
    ok: &mut bool,
    details: &mut Vec<String>,
) -> Result<(), SchematicError> {
    match result {
        Ok(report) if report.verdict => Ok(()),
        Ok(report) => {
            *ok = false;
            details.push(format!("{label}: {}", report.failures.join("; ")));
            Ok(())
        }
        Err(SchematicError::NotPseudoSchematic(d)) => {
            *ok = false;
            details.push(format!("{label}: not pseudo-schematic ({d})"));
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Hypothesis: schematic fibers, flat-immersion transitions, and every
/// overlap projection a qc-isomorphism. Conclusion: the cylinder is
/// schematic. Only that direction is asserted.
pub fn check_cylinder_theorem(
    x: &LaxDatum<RingKernel>,
    caps: &Caps,
) -> Result<CylinderTheoremReport, SchematicError> {
    let index = x.index();
    let mut details = Vec::new();
    let mut fibers_schematic = true;
    for p in 0..index.len() {
        let report = is_schematic(x.fiber(p), caps)?;
        if !report.verdict {
            fibers_schematic = false;
            details.push(format!(
                "fiber {} is not schematic: {}",
                index.id(p),
                report.failures.join("; ")
            ));
        }
    }
    let mut transitions_flat_immersions = true;
    for (p, q) in index.related_pairs() {
        if p == q {
            continue;
        }
        match is_flat_immersion(x.transition(p, q), caps) {
            Ok(report) if report.verdict => {}
            Ok(report) => {
                transitions_flat_immersions = false;
                details.push(format!(
                    "transition {} <= {} is not a flat immersion: {}",
                    index.id(p),
                    index.id(q),
                    report.failures.join("; ")
                ));
            }
            Err(SchematicError::NotPseudoSchematic(d)) => {
                transitions_flat_immersions = false;
                details.push(format!(
                    "transition {} <= {}: {}",
                    index.id(p),
                    index.id(q),
                    d
                ));
            }
            Err(e) => return Err(e),
        }
    }
    let mut projections_qc_iso = true;
    for t in 0..index.len() {
        let over = index.up_set_vec(t);
        for (i, &p) in over.iter().enumerate() {
            for &q in &over[i..] {
                qc_check(
                    overlap_projection(x, t, p, q, caps)
                        .and_then(|pi| is_qc_iso(&pi, caps)),
                    format!(
                        "projection over {} for charts {} and {}",
                        index.id(t),
                        index.id(p),
                        index.id(q)
                    ),
                    &mut projections_qc_iso,
                    &mut details,
                )?;
            }
        }
    }
    let hypothesis = fibers_schematic && transitions_flat_immersions && projections_qc_iso;
    let conclusion_report = is_schematic(&cylinder(x)?.data, caps)?;
    if !conclusion_report.verdict {
        details.push(format!(
            "cylinder is not schematic: {}",
            conclusion_report.failures.join("; ")
        ));
    }
    let conclusion = Some(conclusion_report.verdict);
    Ok(CylinderTheoremReport {
        fibers_schematic,
        transitions_flat_immersions,
        projections_qc_iso,
        hypothesis,
        conclusion,
        implication_ok: !hypothesis || conclusion == Some(true),
        details,
    })
}

/// Analogue for a morphism of families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismTheoremReport {
    pub cylinders_schematic: bool,
    pub projections_qc_iso: bool,
    pub hypothesis: bool,
    pub conclusion: Option<bool>,
    pub implication_ok: bool,
    pub details: Vec<String>,
}

/// Hypothesis: both cylinders schematic and every relative overlap
/// projection a qc-isomorphism. Conclusion: the glued cylinder morphism is
/// schematic. Only that direction is asserted.
pub fn check_cylinder_morphism_theorem(
    f: &LaxDatumMorphism<RingKernel>,
    caps: &Caps,
) -> Result<MorphismTheoremReport, SchematicError> {
    let xs = f.source().index();
    let ys = f.target().index();
    let mut details = Vec::new();
    let src_cyl = cylinder(f.source())?;
    let dst_cyl = cylinder(f.target())?;
    let mut cylinders_schematic = true;
    for (label, data) in [("source", &src_cyl.data), ("target", &dst_cyl.data)] {
        let report = is_schematic(data, caps)?;
        if !report.verdict {
            cylinders_schematic = false;
            details.push(format!(
                "{label} cylinder is not schematic: {}",
                report.failures.join("; ")
            ));
        }
    }
    let mut projections_qc_iso = true;
    for p in 0..xs.len() {
        let fp_index = f.shape_map().apply(p);
        for q in 0..ys.len() {
            if !ys.leq(fp_index, q) {
                continue;
            }
            let result = (|| {
                let mut mask = 0u64;
                for r in 0..xs.len() {
                    if xs.leq(p, r) && ys.leq(q, f.shape_map().apply(r)) {
                        mask |= 1 << r;
                    }
                }
                let (restricted, kept) = f.source().restrict_to_up_set(mask)?;
                let cyl = cylinder(&restricted)?;
                let legs_left: Vec<RingedMorphism> =
                    kept.iter().map(|&r| f.source().transition(p, r).clone()).collect();
                let legs_right: Vec<RingedMorphism> = kept
                    .iter()
                    .map(|&r| {
                        f.target()
                            .transition(q, f.shape_map().apply(r))
                            .compose(f.component(r))
                    })
                    .collect::<Result<_, _>>()?;
                let to_left = glue_fiber_maps(&cyl, &legs_left, f.source().fiber(p))?;
                let to_right = glue_fiber_maps(&cyl, &legs_right, f.target().fiber(q))?;
                let fp = fibered_product(
                    f.component(p),
                    f.target().transition(fp_index, q),
                    caps,
                )?;
                let rho = fp.pair(&to_left, &to_right)?;
                is_qc_iso(&rho, caps)
            })();
            qc_check(
                result,
                format!(
                    "relative projection at {} over {}",
                    xs.id(p),
                    ys.id(q)
                ),
                &mut projections_qc_iso,
                &mut details,
            )?;
        }
    }
    let hypothesis = cylinders_schematic && projections_qc_iso;
    let glued = cylinder_map(f, &src_cyl, &dst_cyl)?;
    let conclusion_report = is_schematic_morphism(&glued, caps)?;
    if !conclusion_report.verdict {
        details.push(format!(
            "cylinder morphism is not schematic: {}",
            conclusion_report.failures.join("; ")
        ));
    }
    let conclusion = Some(conclusion_report.verdict);
    Ok(MorphismTheoremReport {
        cylinders_schematic,
        projections_qc_iso,
        hypothesis,
        conclusion,
        implication_ok: !hypothesis || conclusion == Some(true),
        details,
    })
}

/// Everything the nerve of a cover promises: a schematic cylinder, an
/// augmentation that is schematic and a flat immersion, and the
/// augmentation a qc-isomorphism exactly when the cover is jointly
/// surjective on spectra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NerveCorollaryReport {
    pub cylinder_schematic: bool,
    pub augmentation_schematic: bool,
    pub augmentation_flat_immersion: bool,
    pub augmentation_qc_iso: bool,
    pub jointly_surjective: bool,
    pub equivalence_ok: bool,
    /// Spectrum classes of the covered space no chart reaches, by a
    /// representative (chart, prime) pair.
    pub missing_primes: Vec<(usize, Ideal)>,
    pub details: Vec<String>,
}

pub fn check_nerve_corollary(
    space: &RingedPoset,
    legs: &[RingedMorphism],
    caps: &Caps,
) -> Result<NerveCorollaryReport, SchematicError> {
    let nerve = nerve_datum(space, legs, caps)?;
    let mut details = Vec::new();
    let cylinder_report = is_schematic(&nerve.cylinder.data, caps)?;
    if !cylinder_report.verdict {
        details.push(format!(
            "nerve cylinder is not schematic: {}",
            cylinder_report.failures.join("; ")
        ));
    }
    let schematic_report = is_schematic_morphism(&nerve.augmentation, caps)?;
    if !schematic_report.verdict {
        details.push(format!(
            "augmentation is not schematic: {}",
            schematic_report.failures.join("; ")
        ));
    }
    let immersion_report = is_flat_immersion(&nerve.augmentation, caps)?;
    if !immersion_report.verdict {
        details.push(format!(
            "augmentation is not a flat immersion: {}",
            immersion_report.failures.join("; ")
        ));
    }
    let qc = is_qc_iso(&nerve.augmentation, caps)?;
    if !qc.verdict {
        details.push(format!("augmentation spectrum map: {}", qc.failures.join("; ")));
    }
    let target = spec_space(space, caps)?;
    let mut hit = vec![false; target.points.len()];
    for leg in legs {
        let source = spec_space(leg.source(), caps)?;
        for &class in &induced_spec_map(leg, &source, &target)? {
            hit[class] = true;
        }
    }
    let missing_primes: Vec<(usize, Ideal)> = hit
        .iter()
        .enumerate()
        .filter(|(_, covered)| !**covered)
        .map(|(c, _)| target.points[c].members[0].clone())
        .collect();
    let jointly_surjective = missing_primes.is_empty();
    Ok(NerveCorollaryReport {
        cylinder_schematic: cylinder_report.verdict,
        augmentation_schematic: schematic_report.verdict,
        augmentation_flat_immersion: immersion_report.verdict,
        augmentation_qc_iso: qc.verdict,
        jointly_surjective,
        equivalence_ok: qc.verdict == jointly_surjective,
        missing_primes,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{MonotoneMap, Poset};
    use crate::ring::zn;

    fn caps() -> Caps {
        Caps::default()
    }

    fn mod_map(src: &FinRing, dst: &FinRing) -> RingHom {
        // Additive-order trick: send 1 to 1 and extend additively.
        let one_image = dst.one();
        let mut map = vec![0usize; src.order()];
        let mut acc_src = src.zero();
        let mut acc_dst = dst.zero();
        for _ in 0..src.order() {
            map[acc_src] = acc_dst;
            acc_src = src.add(acc_src, src.one());
            acc_dst = dst.add(acc_dst, one_image);
        }
        RingHom::new(src.clone(), dst.clone(), map).expect("reduction is a ring hom")
    }

    fn chain_data(bottom: FinRing, top: FinRing, map: RingHom) -> RingedPoset {
        let shape = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = shape.index("lo").unwrap();
        let hi = shape.index("hi").unwrap();
        let stalks = if lo < hi { vec![bottom, top] } else { vec![top, bottom] };
        CData::new(shape, stalks, BTreeMap::from([((lo, hi), map)])).unwrap()
    }

    fn point_space(r: FinRing) -> RingedPoset {
        CData::single("*", r)
    }

    fn chart_inclusion(chart: FinRing, space: &RingedPoset, co: RingHom) -> RingedMorphism {
        let source = point_space(chart);
        let base = MonotoneMap::new(source.shape().clone(), space.shape().clone(), vec![0])
            .unwrap();
        CDataMorphism::new(&source, space, base, vec![co]).unwrap()
    }

    #[test]
    fn point_space_is_schematic() {
        let report = is_schematic(&point_space(zn(6)), &caps()).unwrap();
        assert!(report.verdict, "{:?}", report.failures);
    }

    #[test]
    fn flat_epi_chain_is_schematic() {
        let z6 = zn(6);
        let z2 = zn(2);
        let data = chain_data(z6.clone(), z2.clone(), mod_map(&z6, &z2));
        assert!(is_pseudo_schematic(&data, &Caps::roomy()).unwrap().verdict);
        let report = is_schematic(&data, &Caps::roomy()).unwrap();
        assert!(report.verdict, "{:?}", report.failures);
    }

    #[test]
    fn non_flat_chain_is_not_pseudo_schematic() {
        let z4 = zn(4);
        let z2 = zn(2);
        let data = chain_data(z4.clone(), z2.clone(), mod_map(&z4, &z2));
        let report = is_pseudo_schematic(&data, &caps()).unwrap();
        assert!(!report.verdict);
        assert!(report.failures[0].contains("not flat"), "{}", report.failures[0]);
        assert!(!is_schematic(&data, &caps()).unwrap().verdict);
    }

    #[test]
    fn doubled_point_is_pseudo_schematic_but_not_schematic() {
        // Two copies of the chart Z/2 over Z/6 with no point above both:
        // the overlap tensor Z/2 is nonzero but has nowhere to go.
        let z6 = zn(6);
        let z2 = zn(2);
        let shape = Poset::new(&["t", "x", "y"], &[("t", "x"), ("t", "y")]).unwrap();
        let t = shape.index("t").unwrap();
        let x = shape.index("x").unwrap();
        let y = shape.index("y").unwrap();
        let mut stalks = vec![z2.clone(), z2.clone(), z2.clone()];
        stalks[t] = z6.clone();
        let data = CData::new(
            shape,
            stalks,
            BTreeMap::from([((t, x), mod_map(&z6, &z2)), ((t, y), mod_map(&z6, &z2))]),
        )
        .unwrap();
        assert!(is_pseudo_schematic(&data, &Caps::roomy()).unwrap().verdict);
        let report = is_schematic(&data, &Caps::roomy()).unwrap();
        assert!(!report.verdict);
        assert!(report.failures[0].contains("overlap"), "{}", report.failures[0]);
    }

    #[test]
    fn separated_vee_is_schematic() {
        let z6 = zn(6);
        let z2 = zn(2);
        let z3 = zn(3);
        let shape = Poset::new(&["t", "x", "y"], &[("t", "x"), ("t", "y")]).unwrap();
        let t = shape.index("t").unwrap();
        let x = shape.index("x").unwrap();
        let y = shape.index("y").unwrap();
        let mut stalks = vec![z2.clone(); 3];
        stalks[t] = z6.clone();
        stalks[y] = z3.clone();
        let data = CData::new(
            shape,
            stalks,
            BTreeMap::from([((t, x), mod_map(&z6, &z2)), ((t, y), mod_map(&z6, &z3))]),
        )
        .unwrap();
        let report = is_schematic(&data, &Caps::roomy()).unwrap();
        assert!(report.verdict, "{:?}", report.failures);
    }

    #[test]
    fn spec_of_z6_point_has_two_local_rings() {
        let space = spec_space(&point_space(zn(6)), &caps()).unwrap();
        assert_eq!(space.len(), 2);
        let mut orders: Vec<usize> =
            space.points.iter().map(|p| p.local_ring.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![2, 3]);
    }

    #[test]
    fn spec_identifies_chart_primes_down_the_chain() {
        let z6 = zn(6);
        let z2 = zn(2);
        let data = chain_data(z6.clone(), z2.clone(), mod_map(&z6, &z2));
        let space = spec_space(&data, &caps()).unwrap();
        assert_eq!(space.len(), 2);
        let fused = space.points.iter().find(|p| p.members.len() == 2).unwrap();
        assert_eq!(fused.local_ring.order(), 2);
        let lone = space.points.iter().find(|p| p.members.len() == 1).unwrap();
        assert_eq!(lone.local_ring.order(), 3);
    }

    #[test]
    fn spec_of_zero_ring_is_empty() {
        let space = spec_space(&point_space(zero_ring()), &caps()).unwrap();
        assert!(space.is_empty());
    }

    #[test]
    fn spec_space_requires_flat_epi_restrictions() {
        let z4 = zn(4);
        let z2 = zn(2);
        let data = chain_data(z4.clone(), z2.clone(), mod_map(&z4, &z2));
        assert!(matches!(
            spec_space(&data, &caps()),
            Err(SchematicError::NotPseudoSchematic(_))
        ));
    }

    #[test]
    fn collapse_of_a_chain_to_its_minimum_is_a_qc_iso() {
        let z6 = zn(6);
        let z2 = zn(2);
        let data = chain_data(z6.clone(), z2.clone(), mod_map(&z6, &z2));
        let collapse = CDataMorphism::collapse_to_minimum(&data).unwrap();
        let report = is_qc_iso(&collapse, &caps()).unwrap();
        assert!(report.verdict, "{:?}", report.failures);
        assert_eq!(report.source_points, 2);
        assert_eq!(report.target_points, 2);
    }

    #[test]
    fn chart_inclusion_is_flat_immersion_but_not_faithfully_flat() {
        let z6 = zn(6);
        let z2 = zn(2);
        let space = point_space(z6.clone());
        let leg = chart_inclusion(z2.clone(), &space, mod_map(&z6, &z2));
        let qc = is_qc_iso(&leg, &caps()).unwrap();
        assert!(!qc.verdict);
        assert_eq!((qc.source_points, qc.target_points), (1, 2));
        let immersion = is_flat_immersion(&leg, &caps()).unwrap();
        assert!(immersion.verdict, "{:?}", immersion.failures);
        let ff = is_faithfully_flat_morphism(&leg, &caps()).unwrap();
        assert!(!ff.verdict);
        assert!(ff.failures[0].contains("not reached"));
    }

    #[test]
    fn non_flat_comorphism_is_not_a_flat_immersion() {
        let z4 = zn(4);
        let z2 = zn(2);
        let space = point_space(z4.clone());
        let leg = chart_inclusion(z2.clone(), &space, mod_map(&z4, &z2));
        let report = is_flat_immersion(&leg, &caps()).unwrap();
        assert!(!report.verdict);
        assert!(report.failures[0].contains("not flat"));
    }

    fn z6_cover_legs(space: &RingedPoset) -> Vec<RingedMorphism> {
        let z6 = zn(6);
        vec![
            chart_inclusion(zn(2), space, mod_map(&z6, &zn(2))),
            chart_inclusion(zn(3), space, mod_map(&z6, &zn(3))),
        ]
    }

    #[test]
    fn nerve_of_the_z6_cover_has_a_zero_ring_overlap() {
        let space = point_space(zn(6));
        let nerve = nerve_datum(&space, &z6_cover_legs(&space), &caps()).unwrap();
        assert_eq!(nerve.datum.index().len(), 3);
        let mut orders: Vec<(usize, usize)> = (0..3)
            .map(|k| (nerve.members[k].len(), nerve.datum.fiber(k).stalk(0).order()))
            .collect();
        orders.sort();
        assert_eq!(orders, vec![(1, 2), (1, 3), (2, 1)]);
        assert!(is_schematic(&nerve.cylinder.data, &caps()).unwrap().verdict);
    }

    #[test]
    fn nerve_overlap_of_nested_charts_is_the_smaller_chart() {
        let z6 = zn(6);
        let space = point_space(z6.clone());
        let legs = vec![
            chart_inclusion(zn(2), &space, mod_map(&z6, &zn(2))),
            chart_inclusion(z6.clone(), &space, RingHom::identity(&z6)),
        ];
        let nerve = nerve_datum(&space, &legs, &caps()).unwrap();
        let mut orders: Vec<(usize, usize)> = (0..3)
            .map(|k| (nerve.members[k].len(), nerve.datum.fiber(k).stalk(0).order()))
            .collect();
        orders.sort();
        assert_eq!(orders, vec![(1, 2), (1, 6), (2, 2)]);
    }

    #[test]
    fn nerve_rejects_non_flat_legs() {
        let z4 = zn(4);
        let space = point_space(z4.clone());
        let legs = vec![chart_inclusion(zn(2), &space, mod_map(&z4, &zn(2)))];
        assert!(matches!(
            nerve_datum(&space, &legs, &caps()),
            Err(SchematicError::NotAFlatImmersion { leg: 0, .. })
        ));
    }

    #[test]
    fn cylinder_theorem_holds_for_the_z6_nerve() {
        let space = point_space(zn(6));
        let nerve = nerve_datum(&space, &z6_cover_legs(&space), &caps()).unwrap();
        let report = check_cylinder_theorem(&nerve.datum, &caps()).unwrap();
        assert!(report.hypothesis, "{:?}", report.details);
        assert_eq!(report.conclusion, Some(true));
        assert!(report.implication_ok);
    }

    #[test]
    fn cylinder_theorem_flags_a_non_flat_transition() {
        let z4 = zn(4);
        let z2 = zn(2);
        let index = Poset::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let lo = index.index("lo").unwrap();
        let hi = index.index("hi").unwrap();
        let mut fibers = vec![point_space(z2.clone()), point_space(z2.clone())];
        fibers[lo] = point_space(z4.clone());
        let base = MonotoneMap::new(
            fibers[hi].shape().clone(),
            fibers[lo].shape().clone(),
            vec![0],
        )
        .unwrap();
        let trans =
            CDataMorphism::new(&fibers[hi], &fibers[lo], base, vec![mod_map(&z4, &z2)])
                .unwrap();
        let datum =
            LaxDatum::new(index, fibers, BTreeMap::from([((lo, hi), trans)])).unwrap();
        let report = check_cylinder_theorem(&datum, &caps()).unwrap();
        assert!(!report.transitions_flat_immersions);
        assert!(!report.hypothesis);
        assert!(report.implication_ok);
    }

    #[test]
    fn morphism_theorem_holds_for_the_nerve_augmentation() {
        let space = point_space(zn(6));
        let nerve = nerve_datum(&space, &z6_cover_legs(&space), &caps()).unwrap();
        let target = crate::cylinder::single_datum("*", &space).unwrap();
        let shape_map = MonotoneMap::new(
            nerve.datum.index().clone(),
            target.index().clone(),
            vec![0; nerve.datum.index().len()],
        )
        .unwrap();
        let components = nerve.fiber_augmentations.clone();
        let f = LaxDatumMorphism::new(&nerve.datum, &target, shape_map, components).unwrap();
        let report = check_cylinder_morphism_theorem(&f, &caps()).unwrap();
        assert!(report.hypothesis, "{:?}", report.details);
        assert_eq!(report.conclusion, Some(true));
        assert!(report.implication_ok);
    }

    #[test]
    fn full_z6_cover_passes_the_nerve_corollary_with_a_qc_iso() {
        let space = point_space(zn(6));
        let report = check_nerve_corollary(&space, &z6_cover_legs(&space), &caps()).unwrap();
        assert!(report.cylinder_schematic, "{:?}", report.details);
        assert!(report.augmentation_schematic, "{:?}", report.details);
        assert!(report.augmentation_flat_immersion, "{:?}", report.details);
        assert!(report.augmentation_qc_iso, "{:?}", report.details);
        assert!(report.jointly_surjective);
        assert!(report.equivalence_ok);
        assert!(report.missing_primes.is_empty());
    }

    #[test]
    fn single_chart_cover_misses_the_three_torsion_prime() {
        let z6 = zn(6);
        let space = point_space(z6.clone());
        let legs = vec![chart_inclusion(zn(2), &space, mod_map(&z6, &zn(2)))];
        let report = check_nerve_corollary(&space, &legs, &caps()).unwrap();
        assert!(report.cylinder_schematic);
        assert!(report.augmentation_flat_immersion, "{:?}", report.details);
        assert!(!report.augmentation_qc_iso);
        assert!(!report.jointly_surjective);
        assert!(report.equivalence_ok);
        assert_eq!(report.missing_primes, vec![(0, vec![0, 3])]);
    }
}
