//! Finite posets with interned element ids.
//!
//! The order relation is stored transitively closed, one u64 bitset row per
//! element, which caps posets at 64 points. Elements are kept sorted by id,
//! so indices are deterministic for any construction order. Minimal open
//! neighborhoods in the up-set topology are `up_set`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;

pub const MAX_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetError {
    DuplicateId(String),
    UnknownElement(String),
    /// A covers/relation input would force x <= y <= x for distinct x, y.
    CycleError(String, String),
    NotTransitive(String, String, String),
    NotMonotone(String, String),
    /// Source/target posets of an operation do not line up.
    ShapeMismatch,
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },
    EmptyIndex,
    NonFunctorialTransitions(String),
    NotUpClosed(String),
}

impl core::fmt::Display for PosetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PosetError::DuplicateId(x) => write!(f, "duplicate element id {x:?}"),
            PosetError::UnknownElement(x) => write!(f, "unknown element id {x:?}"),
            PosetError::CycleError(x, y) => write!(f, "cycle through {x:?} and {y:?}"),
            PosetError::NotTransitive(x, y, z) => {
                write!(f, "relation not transitive at {x:?} <= {y:?} <= {z:?}")
            }
            PosetError::NotMonotone(x, y) => {
                write!(f, "map not monotone on {x:?} <= {y:?}")
            }
            PosetError::ShapeMismatch => write!(f, "posets of the two sides differ"),
            PosetError::SizeCapExceeded { what, size, cap } => {
                write!(f, "size cap exceeded for {what}: {size} > {cap}")
            }
            PosetError::EmptyIndex => write!(f, "empty index set"),
            PosetError::NonFunctorialTransitions(w) => {
                write!(f, "transitions are not functorial: {w}")
            }
            PosetError::NotUpClosed(x) => write!(f, "subset is not up-closed at {x:?}"),
        }
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct PosetInner {
    ids: Vec<String>,
    /// le[i] bit j set iff element i <= element j. Reflexive, transitive.
    le: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Poset {
    inner: Arc<PosetInner>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}
impl Eq for Poset {}
impl PartialOrd for Poset {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Poset {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.inner.cmp(&other.inner)
    }
}

impl Poset {
    /// Builds from element ids and covering pairs `(lower, upper)`.
    /// The relation is the reflexive-transitive closure of the covers.
    pub fn new<S: AsRef<str>>(ids: &[S], covers: &[(S, S)]) -> Result<Poset, PosetError> {
        let mut sorted: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateId(w[0].clone()));
            }
        }
        if sorted.len() > MAX_POINTS {
            return Err(PosetError::SizeCapExceeded {
                what: "poset points",
                size: sorted.len(),
                cap: MAX_POINTS,
            });
        }
        let index = |id: &str| -> Result<usize, PosetError> {
            sorted
                .binary_search_by(|probe| probe.as_str().cmp(id))
                .map_err(|_| PosetError::UnknownElement(id.to_string()))
        };
        let n = sorted.len();
        let mut le = vec![0u64; n];
        for (i, row) in le.iter_mut().enumerate() {
            *row |= 1 << i;
        }
        for (a, b) in covers {
            let i = index(a.as_ref())?;
            let j = index(b.as_ref())?;
            le[i] |= 1 << j;
        }
        // Transitive closure.
        for _ in 0..n {
            let mut changed = false;
            for i in 0..n {
                let mut acc = le[i];
                let mut bits = le[i];
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    acc |= le[j];
                }
                if acc != le[i] {
                    le[i] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i] >> j & 1 == 1 && le[j] >> i & 1 == 1 {
                    return Err(PosetError::CycleError(sorted[i].clone(), sorted[j].clone()));
                }
            }
        }
        Ok(Poset { inner: Arc::new(PosetInner { ids: sorted, le }) })
    }

    /// Builds from an explicit relation, which must already be reflexive,
    /// transitive and antisymmetric.
    pub fn from_relation<S: AsRef<str>>(
        ids: &[S],
        leq: impl Fn(&str, &str) -> bool,
    ) -> Result<Poset, PosetError> {
        let mut sorted: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateId(w[0].clone()));
            }
        }
        if sorted.len() > MAX_POINTS {
            return Err(PosetError::SizeCapExceeded {
                what: "poset points",
                size: sorted.len(),
                cap: MAX_POINTS,
            });
        }
        let n = sorted.len();
        let mut le = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || leq(&sorted[i], &sorted[j]) {
                    le[i] |= 1 << j;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i] >> j & 1 == 1 && le[j] >> i & 1 == 1 {
                    return Err(PosetError::CycleError(sorted[i].clone(), sorted[j].clone()));
                }
                if le[i] >> j & 1 == 1 {
                    for k in 0..n {
                        if le[j] >> k & 1 == 1 && le[i] >> k & 1 == 0 {
                            return Err(PosetError::NotTransitive(
                                sorted[i].clone(),
                                sorted[j].clone(),
                                sorted[k].clone(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(Poset { inner: Arc::new(PosetInner { ids: sorted, le }) })
    }

    pub fn point(id: &str) -> Poset {
        Poset::new(&[id], &[]).expect("single point")
    }

    pub fn len(&self) -> usize {
        self.inner.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.inner.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.inner.ids[i]
    }

    pub fn index(&self, id: &str) -> Result<usize, PosetError> {
        self.inner
            .ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map_err(|_| PosetError::UnknownElement(id.to_string()))
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.inner.le[i] >> j & 1 == 1
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Bitmask of `{j : i <= j}`, the minimal open neighborhood of i.
    pub fn up_set(&self, i: usize) -> u64 {
        self.inner.le[i]
    }

    pub fn up_set_vec(&self, i: usize) -> Vec<usize> {
        bits(self.inner.le[i])
    }

    pub fn is_up_closed(&self, subset: u64) -> bool {
        let mut bits_left = subset;
        while bits_left != 0 {
            let i = bits_left.trailing_zeros() as usize;
            bits_left &= bits_left - 1;
            if self.inner.le[i] & !subset != 0 {
                return false;
            }
        }
        true
    }

    /// Covering pairs `(i, j)`: i < j with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.lt(i, j) {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.lt(i, k) && self.lt(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All related pairs `(i, j)` with `i <= j`, including `i == j`.
    pub fn related_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.lt(j, i)))
            .collect()
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(i, j)))
    }

    pub fn opposite(&self) -> Poset {
        let n = self.len();
        let mut le = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                if self.leq(j, i) {
                    le[i] |= 1 << j;
                }
            }
        }
        Poset { inner: Arc::new(PosetInner { ids: self.inner.ids.clone(), le }) }
    }

    /// Induced subposet on the given indices. Ids carry over, so the result
    /// indices are the rank of each kept id.
    pub fn restrict(&self, keep: u64) -> Poset {
        let kept = bits(keep);
        let ids: Vec<String> = kept.iter().map(|&i| self.inner.ids[i].clone()).collect();
        Poset::from_relation(&ids, |a, b| {
            let i = self.index(a).expect("kept id");
            let j = self.index(b).expect("kept id");
            self.leq(i, j)
        })
        .expect("restriction of a poset is a poset")
    }

    /// Connected components of the comparability graph, as bitmasks.
    pub fn components(&self) -> Vec<u64> {
        let n = self.len();
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << start;
            loop {
                let mut grew = false;
                for i in 0..n {
                    if comp >> i & 1 == 0 {
                        continue;
                    }
                    for j in 0..n {
                        if comp >> j & 1 == 0 && (self.leq(i, j) || self.leq(j, i)) {
                            comp |= 1 << j;
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Tag for a point of a disjoint union: escapes the separator so distinct
/// pairs never collide.
pub fn pair_id(outer: &str, inner: &str) -> String {
    let esc = |s: &str| s.replace('\\', "\\\\").replace('/', "\\/");
    format!("{}/{}", esc(outer), esc(inner))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonotoneMap {
    source: Poset,
    target: Poset,
    map: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: Poset, target: Poset, map: Vec<usize>) -> Result<Self, PosetError> {
        assert_eq!(map.len(), source.len(), "map length");
        for (i, j) in source.related_pairs() {
            if !target.leq(map[i], map[j]) {
                return Err(PosetError::NotMonotone(
                    source.id(i).to_string(),
                    source.id(j).to_string(),
                ));
            }
        }
        Ok(MonotoneMap { source, target, map })
    }

    pub fn identity(p: &Poset) -> MonotoneMap {
        MonotoneMap { source: p.clone(), target: p.clone(), map: (0..p.len()).collect() }
    }

    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// self . first (first, then self).
    pub fn compose(&self, first: &MonotoneMap) -> Result<MonotoneMap, PosetError> {
        if first.target != self.source {
            return Err(PosetError::ShapeMismatch);
        }
        let map = first.map.iter().map(|&i| self.map[i]).collect();
        Ok(MonotoneMap { source: first.source.clone(), target: self.target.clone(), map })
    }

    /// Pointwise order on parallel maps.
    pub fn pointwise_leq(&self, other: &MonotoneMap) -> Result<bool, PosetError> {
        if self.source != other.source || self.target != other.target {
            return Err(PosetError::ShapeMismatch);
        }
        Ok((0..self.map.len()).all(|i| self.target.leq(self.map[i], other.map[i])))
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &j in &self.map {
            seen[j] = true;
        }
        self.source.len() == self.target.len() && seen.iter().all(|&b| b)
    }

    /// Bijective and order-reflecting, hence a poset isomorphism.
    pub fn is_iso(&self) -> bool {
        self.is_bijective()
            && self
                .source
                .related_pairs()
                .iter()
                .all(|&(i, j)| self.target.leq(self.map[i], self.map[j]))
            && (0..self.source.len()).all(|i| {
                (0..self.source.len()).all(|j| {
                    !self.target.leq(self.map[i], self.map[j]) || self.source.leq(i, j)
                })
            })
    }
}

/// All monotone maps `p -> q` in lexicographic order on assignment vectors.
pub fn monotone_maps(p: &Poset, q: &Poset, caps: &Caps) -> Result<Vec<MonotoneMap>, PosetError> {
    for (what, size) in [("map source points", p.len()), ("map target points", q.len())] {
        if size > caps.map_poset_points {
            return Err(PosetError::SizeCapExceeded { what, size, cap: caps.map_poset_points });
        }
    }
    if q.is_empty() && !p.is_empty() {
        return Ok(Vec::new());
    }
    let n = p.len();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    let mut depth = 0usize;
    'outer: loop {
        if depth == n {
            out.push(MonotoneMap { source: p.clone(), target: q.clone(), map: assign.clone() });
            if n == 0 {
                break;
            }
            depth -= 1;
            assign[depth] += 1;
        }
        loop {
            if assign[depth] >= q.len() {
                if depth == 0 {
                    break 'outer;
                }
                assign[depth] = 0;
                depth -= 1;
                assign[depth] += 1;
                continue;
            }
            let ok = (0..depth).all(|e| {
                (!p.leq(e, depth) || q.leq(assign[e], assign[depth]))
                    && (!p.leq(depth, e) || q.leq(assign[depth], assign[e]))
            });
            if ok {
                depth += 1;
                break;
            }
            assign[depth] += 1;
        }
    }
    Ok(out)
}

/// The poset of nonempty subsets of `labels`, ordered by inclusion.
/// `members[k]` lists the label indices of subset `k`.
#[derive(Debug)]
pub struct SubsetsPoset {
    pub poset: Poset,
    pub members: Vec<Vec<usize>>,
}

pub fn nonempty_subsets_poset<S: AsRef<str>>(labels: &[S]) -> Result<SubsetsPoset, PosetError> {
    if labels.is_empty() {
        return Err(PosetError::EmptyIndex);
    }
    if labels.len() > 6 {
        return Err(PosetError::SizeCapExceeded {
            what: "subset poset index",
            size: labels.len(),
            cap: 6,
        });
    }
    let n = labels.len();
    let mut ids: Vec<(String, Vec<usize>)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let mem: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let id = mem
            .iter()
            .map(|&i| labels[i].as_ref().replace('\\', "\\\\").replace('+', "\\+"))
            .collect::<Vec<_>>()
            .join("+");
        ids.push((id, mem));
    }
    ids.sort();
    for w in ids.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(PosetError::DuplicateId(w[0].0.clone()));
        }
    }
    let by_id: BTreeMap<&str, &Vec<usize>> =
        ids.iter().map(|(id, mem)| (id.as_str(), mem)).collect();
    let id_list: Vec<&String> = ids.iter().map(|(id, _)| id).collect();
    let poset = Poset::from_relation(&id_list, |a, b| {
        let (ma, mb) = (&by_id[a], &by_id[b]);
        ma.iter().all(|x| mb.contains(x))
    })?;
    let members = poset
        .ids()
        .iter()
        .map(|id| (*by_id[id.as_str()]).clone())
        .collect();
    Ok(SubsetsPoset { poset, members })
}

/// Colimit of a finite diagram of posets: disjoint union, identification of
/// each point with its images, generated preorder, then poset reflection.
pub struct PosetColimit {
    pub poset: Poset,
    /// One leg per diagram object.
    pub legs: Vec<MonotoneMap>,
}

pub fn diagram_colimit(
    objects: &[Poset],
    arrows: &[(usize, usize, MonotoneMap)],
) -> Result<PosetColimit, PosetError> {
    let mut offset = Vec::with_capacity(objects.len());
    let mut total = 0usize;
    for p in objects {
        offset.push(total);
        total += p.len();
    }
    for (s, t, m) in arrows {
        if m.source() != &objects[*s] || m.target() != &objects[*t] {
            return Err(PosetError::ShapeMismatch);
        }
    }
    // Union-find identifying x with its arrow images.
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, t, m) in arrows {
        for x in 0..objects[*s].len() {
            let a = find(&mut parent, offset[*s] + x);
            let b = find(&mut parent, offset[*t] + m.apply(x));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut class_of = vec![0usize; total];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..total {
        let r = find(&mut parent, x);
        if r == x {
            reps.push(x);
        }
    }
    for x in 0..total {
        let r = find(&mut parent, x);
        class_of[x] = reps.binary_search(&r).expect("rep recorded");
    }
    let k = reps.len();
    // Preorder generated by the fiber orders.
    let mut le = vec![vec![false; k]; k];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for (oi, p) in objects.iter().enumerate() {
        for (x, y) in p.related_pairs() {
            le[class_of[offset[oi] + x]][class_of[offset[oi] + y]] = true;
        }
    }
    for mid in 0..k {
        for lo in 0..k {
            if le[lo][mid] {
                for hi in 0..k {
                    if le[mid][hi] {
                        le[lo][hi] = true;
                    }
                }
            }
        }
    }
    // Poset reflection: collapse mutually related classes.
    let mut final_of = vec![usize::MAX; k];
    let mut final_reps: Vec<usize> = Vec::new();
    for c in 0..k {
        if final_of[c] != usize::MAX {
            continue;
        }
        let idx = final_reps.len();
        final_reps.push(c);
        final_of[c] = idx;
        for d in c + 1..k {
            if le[c][d] && le[d][c] {
                final_of[d] = idx;
            }
        }
    }
    let fk = final_reps.len();
    // Tags: lexicographically least member tag names each class.
    let mut names: Vec<Option<String>> = vec![None; fk];
    for (oi, p) in objects.iter().enumerate() {
        let mut outer = alloc::string::String::new();
        {
            use core::fmt::Write;
            let _ = write!(outer, "{oi:02}");
        }
        for x in 0..p.len() {
            let tag = pair_id(&outer, p.id(x));
            let c = final_of[class_of[offset[oi] + x]];
            if names[c].as_ref().map_or(true, |old| tag < *old) {
                names[c] = Some(tag);
            }
        }
    }
    let names: Vec<String> = names.into_iter().map(|n| n.expect("class inhabited")).collect();
    let name_set: BTreeSet<&String> = names.iter().collect();
    if name_set.len() != names.len() {
        return Err(PosetError::DuplicateId("colimit class tag".to_string()));
    }
    let leq_classes = |a: usize, b: usize| le[final_reps[a]][final_reps[b]];
    let poset = Poset::from_relation(&names, |a, b| {
        let ia = names.iter().position(|n| n == a).expect("name");
        let ib = names.iter().position(|n| n == b).expect("name");
        leq_classes(ia, ib)
    })?;
    let class_index_in_poset: Vec<usize> = names
        .iter()
        .map(|n| poset.index(n).expect("tag present"))
        .collect();
    let legs = objects
        .iter()
        .enumerate()
        .map(|(oi, p)| {
            let map = (0..p.len())
                .map(|x| class_index_in_poset[final_of[class_of[offset[oi] + x]]])
                .collect();
            MonotoneMap::new(p.clone(), poset.clone(), map)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PosetColimit { poset, legs })
}

/// Completes transitions given on at least the covering relations to all
/// related pairs by composition, and checks strict functoriality.
pub fn complete_over_poset<T: Clone + PartialEq>(
    shape: &Poset,
    given: &BTreeMap<(usize, usize), T>,
    identity: impl Fn(usize) -> T,
    // combine(outer pair (p,r), inner pair (r,q)) -> candidate for (p,q)
    combine: impl Fn(&T, &T) -> Result<T, PosetError>,
) -> Result<BTreeMap<(usize, usize), T>, PosetError> {
    let n = shape.len();
    let mut full: BTreeMap<(usize, usize), T> = BTreeMap::new();
    for i in 0..n {
        let id_t = identity(i);
        if let Some(t) = given.get(&(i, i)) {
            if *t != id_t {
                return Err(PosetError::NonFunctorialTransitions(format!(
                    "transition at {} is not the identity",
                    shape.id(i)
                )));
            }
        }
        full.insert((i, i), id_t);
    }
    // Pairs in order of interval size so composites are available.
    let mut pairs: Vec<(usize, usize)> =
        shape.related_pairs().into_iter().filter(|(i, j)| i != j).collect();
    pairs.sort_by_key(|&(i, j)| {
        let between = (0..n).filter(|&k| shape.leq(i, k) && shape.leq(k, j)).count();
        (between, i, j)
    });
    for (i, j) in pairs {
        let candidate = if let Some(t) = given.get(&(i, j)) {
            t.clone()
        } else {
            let mid = (0..n).find(|&k| k != i && k != j && shape.leq(i, k) && shape.leq(k, j));
            match mid {
                Some(k) => {
                    let outer = full.get(&(i, k)).expect("smaller interval done").clone();
                    let inner = full.get(&(k, j)).expect("smaller interval done").clone();
                    combine(&outer, &inner)?
                }
                None => {
                    return Err(PosetError::NonFunctorialTransitions(format!(
                        "missing transition {} <= {}",
                        shape.id(i),
                        shape.id(j)
                    )))
                }
            }
        };
        full.insert((i, j), candidate);
    }
    // Strict functoriality on all factorizations.
    for i in 0..n {
        for k in 0..n {
            if !shape.leq(i, k) {
                continue;
            }
            for j in 0..n {
                if !shape.leq(k, j) {
                    continue;
                }
                let outer = full.get(&(i, k)).expect("pair");
                let inner = full.get(&(k, j)).expect("pair");
                let composite = combine(outer, inner)?;
                if composite != *full.get(&(i, j)).expect("pair") {
                    return Err(PosetError::NonFunctorialTransitions(format!(
                        "{} <= {} <= {} does not compose",
                        shape.id(i),
                        shape.id(k),
                        shape.id(j)
                    )));
                }
            }
        }
    }
    Ok(full)
}

pub fn bits(mask: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// The four-point circle model: two minimal points under two maximal points.
pub fn circle_model() -> Poset {
    Poset::new(
        &["a", "b", "c", "d"],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )
    .expect("circle model")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain(n: usize) -> Poset {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(String, String)> =
            (0..n.saturating_sub(1)).map(|i| (format!("c{i}"), format!("c{}", i + 1))).collect();
        Poset::new(&ids, &covers).unwrap()
    }

    #[test]
    fn closure_of_circle_model() {
        let p = circle_model();
        let a = p.index("a").unwrap();
        let up: Vec<&str> = p.up_set_vec(a).iter().map(|&i| p.id(i)).collect();
        assert_eq!(up, ["a", "c", "d"]);
        let c = p.index("c").unwrap();
        assert!(p.leq(a, c));
        assert!(!p.leq(c, a));
        assert_eq!(p.covers().len(), 4);
    }

    #[test]
    fn chain_closure_is_total() {
        let p = chain(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.leq(i, j), i <= j);
            }
        }
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Poset::new(&["x", "y"], &[("x", "y"), ("y", "x")]).unwrap_err();
        assert!(matches!(err, PosetError::CycleError(..)));
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let err = Poset::new(&["x", "x"], &[]).unwrap_err();
        assert!(matches!(err, PosetError::DuplicateId(..)));
    }

    #[test]
    fn three_monotone_selfmaps_of_the_two_chain() {
        let p = chain(2);
        let maps = monotone_maps(&p, &p, &Caps::default()).unwrap();
        let vecs: Vec<&[usize]> = maps.iter().map(|m| m.map()).collect();
        assert_eq!(vecs, [&[0, 0][..], &[0, 1], &[1, 1]]);
    }

    #[test]
    fn map_enumeration_respects_cap() {
        let p = chain(10);
        let err = monotone_maps(&p, &p, &Caps::default()).unwrap_err();
        assert!(matches!(err, PosetError::SizeCapExceeded { .. }));
    }

    #[test]
    fn pointwise_order_on_maps() {
        let p = chain(2);
        let maps = monotone_maps(&p, &p, &Caps::default()).unwrap();
        assert!(maps[0].pointwise_leq(&maps[1]).unwrap());
        assert!(!maps[1].pointwise_leq(&maps[0]).unwrap());
        assert!(maps[0].pointwise_leq(&maps[0]).unwrap());
    }

    #[test]
    fn subsets_poset_of_two_labels() {
        let s = nonempty_subsets_poset(&["1", "2"]).unwrap();
        assert_eq!(s.poset.len(), 3);
        let single = s.poset.index("1").unwrap();
        let both = s.poset.index("1+2").unwrap();
        assert!(s.poset.leq(single, both));
        assert!(!s.poset.leq(both, single));
        assert_eq!(s.members[both], vec![0, 1]);
    }

    #[test]
    fn empty_subset_index_rejected() {
        let err = nonempty_subsets_poset::<&str>(&[]).unwrap_err();
        assert_eq!(err, PosetError::EmptyIndex);
    }

    #[test]
    fn span_colimit_collapses_to_a_point() {
        // Pushout shape: one point mapping into two others, all singletons.
        let pt = Poset::point("*");
        let arrows = vec![
            (0usize, 1usize, MonotoneMap::new(pt.clone(), pt.clone(), vec![0]).unwrap()),
            (0usize, 2usize, MonotoneMap::new(pt.clone(), pt.clone(), vec![0]).unwrap()),
        ];
        let col = diagram_colimit(&[pt.clone(), pt.clone(), pt.clone()], &arrows).unwrap();
        assert_eq!(col.poset.len(), 1);
        for leg in &col.legs {
            assert_eq!(leg.apply(0), 0);
        }
    }

    #[test]
    fn reflection_collapses_opposed_identifications() {
        // Two 2-chains glued head-to-tail force x <= y <= x.
        let c = chain(2);
        let swap_src = Poset::new(&["u", "v"], &[]).unwrap();
        let m1 = MonotoneMap::new(swap_src.clone(), c.clone(), vec![0, 1]).unwrap();
        let m2 = MonotoneMap::new(swap_src.clone(), c.clone(), vec![1, 0]).unwrap();
        let col = diagram_colimit(&[swap_src, c.clone(), c.clone()], &[
            (0, 1, m1),
            (0, 2, m2),
        ])
        .unwrap();
        assert_eq!(col.poset.len(), 1, "antisymmetry quotient applies");
    }

    #[test]
    fn colimit_of_disjoint_fibers_is_their_sum() {
        let col = diagram_colimit(&[chain(2), Poset::point("*")], &[]).unwrap();
        assert_eq!(col.poset.len(), 3);
        assert!(col.legs[0].pointwise_leq(&col.legs[0]).unwrap());
    }

    #[test]
    fn up_closed_detection() {
        let p = circle_model();
        let a = p.index("a").unwrap();
        assert!(p.is_up_closed(p.up_set(a)));
        assert!(!p.is_up_closed(1 << a));
    }

    #[test]
    fn restrict_keeps_order() {
        let p = circle_model();
        let a = p.index("a").unwrap();
        let q = p.restrict(p.up_set(a));
        assert_eq!(q.len(), 3);
        let (qa, qc) = (q.index("a").unwrap(), q.index("c").unwrap());
        assert!(q.leq(qa, qc));
    }

    #[test]
    fn pair_ids_never_collide() {
        assert_ne!(pair_id("a/b", "c"), pair_id("a", "b/c"));
        assert_ne!(pair_id("a\\", "/b"), pair_id("a", "\\/b"));
    }

    #[test]
    fn components_of_disjoint_union() {
        let p = Poset::new(&["x", "y", "z"], &[("x", "y")]).unwrap();
        assert_eq!(p.components().len(), 2);
        assert!(!p.is_connected());
        assert!(chain(3).is_connected());
    }

    proptest! {
        #[test]
        fn monotone_enumeration_is_sound_and_ordered(
            n in 1usize..4, m in 1usize..4, edges in proptest::collection::vec((0usize..4, 0usize..4), 0..4)
        ) {
            let mk = |k: usize, tag: &str, edges: &[(usize, usize)]| {
                let ids: Vec<String> = (0..k).map(|i| format!("{tag}{i}")).collect();
                let covers: Vec<(String, String)> = edges
                    .iter()
                    .filter(|(a, b)| a < b && *b < k)
                    .map(|(a, b)| (format!("{tag}{a}"), format!("{tag}{b}")))
                    .collect();
                Poset::new(&ids, &covers).unwrap()
            };
            let p = mk(n, "p", &edges);
            let q = mk(m, "q", &edges);
            let maps = monotone_maps(&p, &q, &Caps::default()).unwrap();
            // Sound, complete against brute force, lexicographically sorted.
            let mut brute = 0usize;
            let total = m.pow(n as u32);
            for code in 0..total {
                let mut v = Vec::with_capacity(n);
                let mut c = code;
                for _ in 0..n {
                    v.push(c % m);
                    c /= m;
                }
                v.reverse();
                let ok = p.related_pairs().iter().all(|&(i, j)| q.leq(v[i], v[j]));
                if ok {
                    brute += 1;
                    prop_assert!(maps.iter().any(|mm| mm.map() == v.as_slice()));
                }
            }
            prop_assert_eq!(maps.len(), brute);
            for w in maps.windows(2) {
                prop_assert!(w[0].map() < w[1].map());
            }
        }
    }
}
