//! The topological side of the lab: order complexes of finite posets,
//! edge-path fundamental group presentations, first homology, and a
//! Seifert-Van Kampen comparison for cylinders of data with connected
//! fibers.
//!
//! Group isomorphism is undecidable, so the Van Kampen check compares
//! decidable invariants instead: abelianizations in normal form and hom
//! counts into a fixed panel of small finite groups. Disagreement is a
//! genuine counterexample; agreement is evidence, not proof.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::cylinder::{cylinder, LaxDatum};
use crate::intmat::{smith_diag, AbPresentation, Mat};
use crate::kernel::{Kernel, KernelError};
use crate::poset::Poset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyError {
    Kernel(KernelError),
    NotConnected(String),
    DisconnectedFiber(String),
}

impl From<KernelError> for HomotopyError {
    fn from(e: KernelError) -> Self {
        HomotopyError::Kernel(e)
    }
}

impl core::fmt::Display for HomotopyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HomotopyError::Kernel(e) => write!(f, "{e}"),
            HomotopyError::NotConnected(s) => write!(f, "not connected: {s}"),
            HomotopyError::DisconnectedFiber(s) => write!(f, "disconnected fiber: {s}"),
        }
    }
}

const MAX_SIMPLICES: usize = 1 << 20;

/// An abstract simplicial complex on vertices 0..n; simplices are stored
/// as index-sorted vertex lists, closed under faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: usize,
    simplices: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices.iter().filter(|s| s.len() == 2).map(|s| (s[0], s[1])).collect()
    }

    pub fn triangles(&self) -> Vec<[usize; 3]> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 3)
            .map(|s| [s[0], s[1], s[2]])
            .collect()
    }
}

/// The order complex: one simplex per nonempty chain. Since comparability
/// is pairwise in a poset, chains are exactly the cliques of the
/// comparability graph, enumerated here in ascending index order.
pub fn order_complex(p: &Poset) -> Result<SimplicialComplex, KernelError> {
    let n = p.len();
    let comparable = |a: usize, b: usize| p.leq(a, b) || p.leq(b, a);
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|v| vec![v]).collect();
    while let Some(chain) = stack.pop() {
        if simplices.len() >= MAX_SIMPLICES {
            return Err(KernelError::SizeCapExceeded {
                what: "order complex simplices",
                size: simplices.len() + stack.len(),
                cap: MAX_SIMPLICES,
            });
        }
        let last = *chain.last().expect("chains are nonempty");
        for v in (last + 1..n).rev() {
            if chain.iter().all(|&u| comparable(u, v)) {
                let mut bigger = chain.clone();
                bigger.push(v);
                stack.push(bigger);
            }
        }
        simplices.push(chain);
    }
    simplices.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(SimplicialComplex { vertices: n, simplices })
}

/// Words are letter sequences: letter `k+1` is generator k, `-(k+1)` its
/// inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Vec<i64>>,
}

impl GroupPresentation {
    pub fn new(generators: usize, relators: Vec<Vec<i64>>) -> Result<Self, KernelError> {
        for word in &relators {
            for &letter in word {
                if letter == 0 || letter.unsigned_abs() as usize > generators {
                    return Err(KernelError::Structural(format!(
                        "relator letter {letter} is outside the generator range"
                    )));
                }
            }
        }
        Ok(GroupPresentation { generators, relators })
    }

    /// Tietze-simplified presentation of the same group: generators forced
    /// trivial by one-letter relators are erased, and a generator some
    /// relator mentions exactly once in total is solved for and dropped.
    /// Spanning-tree presentations shrink drastically under these two
    /// moves, which keeps exhaustive hom counting inside its budget.
    pub fn simplified(&self) -> GroupPresentation {
        let mut gens = self.generators;
        let mut rels: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|w| cyclic_reduce(free_reduce(w.clone())))
            .filter(|w| !w.is_empty())
            .collect();
        loop {
            if let Some(ri) = rels.iter().position(|w| w.len() == 1) {
                let g = rels[ri][0].unsigned_abs() as usize - 1;
                rels.remove(ri);
                rels = erase_letter(rels, g);
                gens -= 1;
                continue;
            }
            // A generator mentioned exactly once across all relators can
            // be solved for; no substitution is even needed, since no
            // other relator sees it. Prefer short carrying relators.
            let mut pick: Option<usize> = None;
            for (ri, r) in rels.iter().enumerate() {
                let lonely = r.iter().any(|&letter| {
                    let g = letter.unsigned_abs() as usize - 1;
                    rels.iter()
                        .flat_map(|w| w.iter())
                        .filter(|l| l.unsigned_abs() as usize - 1 == g)
                        .count()
                        == 1
                });
                if lonely && pick.map_or(true, |pi: usize| r.len() < rels[pi].len()) {
                    pick = Some(ri);
                }
            }
            let Some(ri) = pick else { break };
            let r = rels.remove(ri);
            let g = r
                .iter()
                .map(|&letter| letter.unsigned_abs() as usize - 1)
                .find(|&g| {
                    r.iter().filter(|l| l.unsigned_abs() as usize - 1 == g).count() == 1
                        && !rels
                            .iter()
                            .any(|w| w.iter().any(|l| l.unsigned_abs() as usize - 1 == g))
                })
                .expect("the carrying relator has a lonely generator");
            rels = renumber_above(rels, g);
            gens -= 1;
        }
        GroupPresentation { generators: gens, relators: rels }
    }

    /// Invariant factors of the abelianization, in the normal-form
    /// convention: torsion in divisor-chain order, one 0 per free rank.
    pub fn abelianized(&self) -> Vec<i64> {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|word| {
                let mut row = vec![0i64; self.generators];
                for &letter in word {
                    let k = letter.unsigned_abs() as usize - 1;
                    row[k] += letter.signum();
                }
                row
            })
            .collect();
        AbPresentation::new(self.generators, &rows).normal_form()
    }
}

fn free_reduce(word: Vec<i64>) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(word.len());
    for letter in word {
        if out.last() == Some(&-letter) {
            out.pop();
        } else {
            out.push(letter);
        }
    }
    out
}

/// Strips conjugating ends; valid on relators, which are only defined up
/// to conjugation.
fn cyclic_reduce(mut word: Vec<i64>) -> Vec<i64> {
    while word.len() >= 2 && word.first() == word.last().map(|&l| -l).as_ref() {
        word.pop();
        word.remove(0);
    }
    word
}

fn renumber_above(rels: Vec<Vec<i64>>, g: usize) -> Vec<Vec<i64>> {
    rels.into_iter()
        .map(|mut w| {
            for l in w.iter_mut() {
                let k = l.unsigned_abs() as usize - 1;
                if k > g {
                    *l = (k as i64) * l.signum();
                }
            }
            w
        })
        .collect()
}

/// Erases every occurrence of generator `g` (it has been proved trivial)
/// and renumbers the survivors.
fn erase_letter(rels: Vec<Vec<i64>>, g: usize) -> Vec<Vec<i64>> {
    let rels = rels
        .into_iter()
        .map(|w| {
            let kept = w.into_iter().filter(|l| l.unsigned_abs() as usize - 1 != g).collect();
            cyclic_reduce(free_reduce(kept))
        })
        .filter(|w: &Vec<i64>| !w.is_empty())
        .collect();
    renumber_above(rels, g)
}

fn inverse_word(word: &[i64]) -> Vec<i64> {
    word.iter().rev().map(|&l| -l).collect()
}

/// Spanning tree bookkeeping for the edge-path group: tree edges carry the
/// empty word, each non-tree edge one generator.
struct SpanningData {
    parent: Vec<Option<usize>>,
    generator_of: BTreeMap<(usize, usize), usize>,
    generators: usize,
}

fn spanning_data(
    k: &SimplicialComplex,
    basepoint: usize,
) -> Result<SpanningData, HomotopyError> {
    let n = k.vertices();
    if n == 0 {
        return Err(HomotopyError::NotConnected("the complex is empty".into()));
    }
    if basepoint >= n {
        return Err(HomotopyError::Kernel(KernelError::Structural(format!(
            "basepoint {basepoint} is outside the complex"
        ))));
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in k.edges() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for row in &mut adjacency {
        row.sort_unstable();
        row.dedup();
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree: alloc::collections::BTreeSet<(usize, usize)> =
        alloc::collections::BTreeSet::new();
    seen[basepoint] = true;
    let mut queue = alloc::collections::VecDeque::from([basepoint]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                tree.insert((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    let missing = seen.iter().filter(|&&s| !s).count();
    if missing > 0 {
        return Err(HomotopyError::NotConnected(format!(
            "{missing} of {n} vertices are not reachable from the basepoint"
        )));
    }
    let mut generator_of = BTreeMap::new();
    for (u, v) in k.edges() {
        if !tree.contains(&(u, v)) {
            let next = generator_of.len();
            generator_of.insert((u, v), next);
        }
    }
    let generators = generator_of.len();
    Ok(SpanningData { parent, generator_of, generators })
}

impl SpanningData {
    /// The word of a single traversed edge: empty on the tree, a signed
    /// generator off it. Endpoints must span an edge or coincide.
    fn edge_word(&self, from: usize, to: usize) -> Vec<i64> {
        if from == to {
            return Vec::new();
        }
        let key = (from.min(to), from.max(to));
        match self.generator_of.get(&key) {
            None => Vec::new(),
            Some(&g) => {
                let letter = g as i64 + 1;
                vec![if from < to { letter } else { -letter }]
            }
        }
    }

    /// Vertex walk from the basepoint to `v` along the tree.
    fn walk_from_root(&self, v: usize) -> Vec<usize> {
        let mut back = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            back.push(p);
            cur = p;
        }
        back.reverse();
        back
    }

    /// The based loop of a generator, as its vertex walk.
    fn generator_walk(&self, g: usize) -> Vec<usize> {
        let (&(u, v), _) = self
            .generator_of
            .iter()
            .find(|(_, &k)| k == g)
            .expect("generator indices are dense");
        let mut walk = self.walk_from_root(u);
        walk.push(v);
        let mut tail = self.walk_from_root(v);
        tail.reverse();
        walk.extend(tail.into_iter().skip(1));
        walk
    }

    /// The word of an arbitrary vertex walk whose steps are edges.
    fn walk_word(&self, walk: &[usize]) -> Vec<i64> {
        let mut word = Vec::new();
        for pair in walk.windows(2) {
            word.extend(self.edge_word(pair[0], pair[1]));
        }
        free_reduce(word)
    }
}

/// Edge-path presentation of the fundamental group: spanning tree by
/// breadth-first search in index order, one generator per non-tree edge,
/// one relator per triangle.
pub fn pi1_presentation(
    k: &SimplicialComplex,
    basepoint: usize,
) -> Result<GroupPresentation, HomotopyError> {
    let span = spanning_data(k, basepoint)?;
    let mut relators = Vec::new();
    for [a, b, c] in k.triangles() {
        let mut word = span.edge_word(a, b);
        word.extend(span.edge_word(b, c));
        word.extend(inverse_word(&span.edge_word(a, c)));
        let word = free_reduce(word);
        if !word.is_empty() {
            relators.push(word);
        }
    }
    Ok(GroupPresentation::new(span.generators, relators)?)
}

/// Invariant factors of simplicial H1, straight from the boundary maps:
/// torsion = nontrivial factors of the triangle boundary, free rank by
/// counting.
pub fn h1_invariants(k: &SimplicialComplex) -> Vec<i64> {
    let edges = k.edges();
    let index_of: BTreeMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let triangles = k.triangles();
    let mut d1 = Mat::zero(k.vertices(), edges.len());
    for (j, &(u, v)) in edges.iter().enumerate() {
        d1.set(u, j, -1);
        d1.set(v, j, 1);
    }
    let mut d2 = Mat::zero(edges.len(), triangles.len());
    for (j, &[a, b, c]) in triangles.iter().enumerate() {
        d2.set(index_of[&(b, c)], j, 1);
        d2.set(index_of[&(a, c)], j, -1);
        d2.set(index_of[&(a, b)], j, 1);
    }
    let s1 = smith_diag(&d1);
    let s2 = smith_diag(&d2);
    let free_rank = edges.len() - s1.rank - s2.rank;
    let mut out: Vec<i64> =
        s2.diag[..s2.rank].iter().map(|d| d.abs()).filter(|&d| d > 1).collect();
    out.extend(core::iter::repeat(0).take(free_rank));
    out
}

/// A finite group by multiplication table. The constructor checks the
/// table is a group and locates identity and inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    name: String,
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl FinGroup {
    pub fn new(name: &str, table: Vec<Vec<usize>>) -> Result<FinGroup, KernelError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(KernelError::Structural("multiplication table is not square".into()));
        }
        let mut mul = vec![0usize; n * n];
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(KernelError::Structural("table entry out of range".into()));
                }
                mul[i * n + j] = v;
            }
        }
        let at = |a: usize, b: usize| mul[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(KernelError::Structural(
                            "multiplication is not associative".into(),
                        ));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| KernelError::Structural("table has no identity".into()))?;
        let mut inv = vec![0usize; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| {
                    KernelError::Structural(format!("element {a} has no inverse"))
                })?;
        }
        Ok(FinGroup { name: name.to_string(), order: n, mul, inv, identity })
    }

    pub fn cyclic(n: usize) -> FinGroup {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FinGroup::new(&format!("z{n}"), table).expect("cyclic tables are groups")
    }

    /// The symmetric group on three letters, elements being the six
    /// permutations in lexicographic one-line order.
    pub fn s3() -> FinGroup {
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("a permutation");
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        FinGroup::new("s3", table).expect("composition of permutations is a group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }
}

/// The comparison panel: small groups, one of them nonabelian.
pub fn group_panel() -> Vec<FinGroup> {
    vec![FinGroup::cyclic(2), FinGroup::cyclic(3), FinGroup::s3(), FinGroup::cyclic(4)]
}

/// Number of group homomorphisms from the presented group into `g`, by
/// exhaustive assignment of the generators.
pub fn count_homs(
    pres: &GroupPresentation,
    g: &FinGroup,
    caps: &Caps,
) -> Result<u64, HomotopyError> {
    let mut total: u128 = 1;
    for _ in 0..pres.generators {
        total = total.saturating_mul(g.order() as u128);
    }
    if total > caps.group_hom_budget as u128 {
        return Err(HomotopyError::Kernel(KernelError::SizeCapExceeded {
            what: "group hom assignments",
            size: usize::try_from(total).unwrap_or(usize::MAX),
            cap: caps.group_hom_budget,
        }));
    }
    let evaluate = |assignment: &[usize], word: &[i64]| {
        word.iter().fold(g.identity(), |acc, &letter| {
            let image = assignment[letter.unsigned_abs() as usize - 1];
            g.mul(acc, if letter > 0 { image } else { g.inv(image) })
        })
    };
    let mut assignment = vec![0usize; pres.generators];
    let mut count = 0u64;
    loop {
        if pres.relators.iter().all(|w| evaluate(&assignment, w) == g.identity()) {
            count += 1;
        }
        let mut k = 0;
        while k < pres.generators {
            assignment[k] += 1;
            if assignment[k] < g.order() {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
        if k == pres.generators {
            return Ok(count);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PanelCount {
    pub group: String,
    pub amalgam: u64,
    pub direct: u64,
}

/// What the Van Kampen comparison actually certifies.
pub const VAN_KAMPEN_METHOD: &str =
    "abelianization and hom counts into a finite panel; disagreement is a \
     counterexample, agreement is evidence";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanKampenReport {
    pub verdict: bool,
    pub amalgam: GroupPresentation,
    pub direct: GroupPresentation,
    pub amalgam_h1: Vec<i64>,
    pub direct_h1: Vec<i64>,
    pub panel: Vec<PanelCount>,
    pub details: Vec<String>,
}

struct FiberSide {
    span: SpanningData,
    presentation: GroupPresentation,
}

/// Image of a fiber vertex walk in another fiber, as a word there.
fn mapped_walk_word(target: &SpanningData, walk: &[usize], map: impl Fn(usize) -> usize) -> Vec<i64> {
    let mapped: Vec<usize> = walk.iter().map(|&v| map(v)).collect();
    target.walk_word(&mapped)
}

/// Compares the fundamental group of the cylinder against the amalgam of
/// the fiber groups over the shape: fiber presentations, one connecting
/// letter per strict shape relation, conjugation relators transporting
/// fiber generators along transitions, and triangle relators for the
/// shape's composable pairs. Connecting letters on a breadth-first
/// spanning tree of the shape are killed.
pub fn van_kampen_check<K: Kernel>(
    x: &LaxDatum<K>,
    caps: &Caps,
) -> Result<VanKampenReport, HomotopyError> {
    let shape = x.index();
    let mut fibers = Vec::with_capacity(shape.len());
    for p in 0..shape.len() {
        let complex = order_complex(x.fiber(p).shape())?;
        let span = match spanning_data(&complex, 0) {
            Ok(span) => span,
            Err(HomotopyError::NotConnected(why)) => {
                return Err(HomotopyError::DisconnectedFiber(format!(
                    "fiber {}: {why}",
                    shape.id(p)
                )))
            }
            Err(e) => return Err(e),
        };
        let presentation = pi1_presentation(&complex, 0)?;
        fibers.push(FiberSide { span, presentation });
    }

    // Generator layout: fiber generators in shape order, then one
    // connecting letter per strict related pair.
    let mut offset = Vec::with_capacity(shape.len());
    let mut total = 0usize;
    for side in &fibers {
        offset.push(total);
        total += side.presentation.generators;
    }
    let strict: Vec<(usize, usize)> =
        shape.related_pairs().into_iter().filter(|&(p, q)| p != q).collect();
    let letter_of: BTreeMap<(usize, usize), usize> =
        strict.iter().enumerate().map(|(k, &e)| (e, total + k)).collect();
    let generators = total + strict.len();

    let shift = |p: usize, word: &[i64]| -> Vec<i64> {
        word.iter()
            .map(|&l| {
                let k = l.unsigned_abs() as usize - 1 + offset[p];
                (k as i64 + 1) * l.signum()
            })
            .collect()
    };
    let letter = |p: usize, q: usize| letter_of[&(p, q)] as i64 + 1;

    let mut relators: Vec<Vec<i64>> = Vec::new();
    for (p, side) in fibers.iter().enumerate() {
        for word in &side.presentation.relators {
            relators.push(shift(p, word));
        }
    }
    // Transporting a fiber generator of the upper chart along the
    // connecting letter must land on its transition image.
    for &(p, q) in &strict {
        let phi = x.transition(p, q).base();
        for g in 0..fibers[q].presentation.generators {
            let walk = fibers[q].span.generator_walk(g);
            let image = mapped_walk_word(&fibers[p].span, &walk, |v| phi.apply(v));
            let mut word = vec![letter(p, q)];
            word.extend(shift(q, &[g as i64 + 1]));
            word.push(-letter(p, q));
            word.extend(inverse_word(&shift(p, &image)));
            let word = free_reduce(word);
            if !word.is_empty() {
                relators.push(word);
            }
        }
    }
    // Composites of connecting letters differ from the direct letter by
    // the image of the middle basepoint's tree walk.
    for &(p, q) in &strict {
        for &(q2, r) in &strict {
            if q2 != q || !shape.leq(p, q) || !shape.leq(q, r) || p == r {
                continue;
            }
            let phi_qr = x.transition(q, r).base();
            let phi_pq = x.transition(p, q).base();
            let walk = fibers[q].span.walk_from_root(phi_qr.apply(0));
            let correction = mapped_walk_word(&fibers[p].span, &walk, |v| phi_pq.apply(v));
            let mut word = vec![letter(p, q), letter(q, r), -letter(p, r)];
            word.extend(inverse_word(&shift(p, &correction)));
            let word = free_reduce(word);
            if !word.is_empty() {
                relators.push(word);
            }
        }
    }
    // Connect the basepoints: kill the letters on a spanning tree of the
    // shape's comparability graph.
    let shape_span = match spanning_data(&order_complex(shape)?, 0) {
        Ok(span) => span,
        Err(HomotopyError::NotConnected(why)) => {
            return Err(HomotopyError::NotConnected(format!("index poset: {why}")))
        }
        Err(e) => return Err(e),
    };
    for &(p, q) in &strict {
        if shape_span.edge_word(p, q).is_empty() {
            relators.push(vec![letter(p, q)]);
        }
    }
    let amalgam = GroupPresentation::new(generators, relators)?;

    let cyl = cylinder(x)?;
    let direct = pi1_presentation(&order_complex(cyl.data.shape())?, 0)?;

    let amalgam_h1 = amalgam.abelianized();
    let direct_h1 = direct.abelianized();
    let mut details = Vec::new();
    let mut verdict = amalgam_h1 == direct_h1;
    if !verdict {
        details.push(format!(
            "abelianizations differ: amalgam {amalgam_h1:?} vs cylinder {direct_h1:?}"
        ));
    }
    // Count on Tietze-simplified copies; hom counts only depend on the
    // isomorphism class, and the raw spanning-tree presentations can have
    // far more generators than the budget tolerates.
    let amalgam_small = amalgam.simplified();
    let direct_small = direct.simplified();
    let mut panel = Vec::new();
    for g in group_panel() {
        let a = count_homs(&amalgam_small, &g, caps)?;
        let d = count_homs(&direct_small, &g, caps)?;
        if a != d {
            details.push(format!(
                "hom counts into {} differ: amalgam {a} vs cylinder {d}",
                g.name()
            ));
            verdict = false;
        }
        panel.push(PanelCount { group: g.name().to_string(), amalgam: a, direct: d });
    }
    Ok(VanKampenReport { verdict, amalgam, direct, amalgam_h1, direct_h1, panel, details })
}
