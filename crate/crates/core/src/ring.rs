//! Finite commutative rings as explicit operation tables.
//!
//! Every constructor verifies the full ring axioms, so a `FinRing` in hand is
//! always an actual unital commutative ring. Elements are normalized so that
//! index 0 is the zero and index 1 the one (except in the zero ring, where
//! they coincide). Ideals are sorted index vectors.

pub mod module;
pub mod tensor;

pub use module::{
    flat_witness, is_faithfully_flat, is_flat, is_quasi_coherent_pair, module_tensor, FinModule,
};
pub use tensor::{is_epi, tensor_rings, ModuleTensor, TensorRing};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    NotARing(String),
    NotAHom(String),
    DuplicateName(String),
    BadTable(String),
    NotAnIdeal(String),
    UnknownName(String),
    ShapeMismatch,
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },
    /// A composite stalk failed a structural expectation, with detail.
    Structural(String),
}

impl core::fmt::Display for RingError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RingError::NotARing(d) => write!(f, "not a ring: {d}"),
            RingError::NotAHom(d) => write!(f, "not a ring hom: {d}"),
            RingError::DuplicateName(n) => write!(f, "duplicate element name {n:?}"),
            RingError::BadTable(d) => write!(f, "bad operation table: {d}"),
            RingError::NotAnIdeal(d) => write!(f, "not an ideal: {d}"),
            RingError::UnknownName(n) => write!(f, "unknown element name {n:?}"),
            RingError::ShapeMismatch => write!(f, "rings of the two sides differ"),
            RingError::SizeCapExceeded { what, size, cap } => {
                write!(f, "size cap exceeded for {what}: {size} > {cap}")
            }
            RingError::Structural(d) => write!(f, "structural check failed: {d}"),
        }
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct RingInner {
    order: usize,
    names: Vec<String>,
    /// Flattened order x order tables, row-major.
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    one: usize,
}

#[derive(Clone, Debug)]
pub struct FinRing {
    inner: Arc<RingInner>,
}

impl PartialEq for FinRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}
impl Eq for FinRing {}
impl PartialOrd for FinRing {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FinRing {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.inner.cmp(&other.inner)
    }
}

impl FinRing {
    /// Builds a ring from full addition and multiplication tables, verifying
    /// every axiom and renumbering so zero sits at index 0 and one at 1.
    pub fn from_named_tables(
        names: Vec<String>,
        add_rows: &[Vec<usize>],
        mul_rows: &[Vec<usize>],
    ) -> Result<FinRing, RingError> {
        let n = names.len();
        if n == 0 {
            return Err(RingError::BadTable("ring needs at least one element".into()));
        }
        {
            let mut seen = BTreeSet::new();
            for name in &names {
                if !seen.insert(name) {
                    return Err(RingError::DuplicateName(name.clone()));
                }
            }
        }
        let flatten = |rows: &[Vec<usize>], what: &str| -> Result<Vec<usize>, RingError> {
            if rows.len() != n {
                return Err(RingError::BadTable(format!("{what} table must have {n} rows")));
            }
            let mut out = Vec::with_capacity(n * n);
            for row in rows {
                if row.len() != n {
                    return Err(RingError::BadTable(format!("{what} rows must have {n} entries")));
                }
                for &v in row {
                    if v >= n {
                        return Err(RingError::BadTable(format!("{what} entry {v} out of range")));
                    }
                    out.push(v);
                }
            }
            Ok(out)
        };
        let add = flatten(add_rows, "add")?;
        let mul = flatten(mul_rows, "mul")?;
        let at = |t: &[usize], i: usize, j: usize| t[i * n + j];

        let zero = (0..n)
            .find(|&z| (0..n).all(|x| at(&add, z, x) == x && at(&add, x, z) == x))
            .ok_or_else(|| RingError::NotARing("no additive identity".into()))?;
        let one = (0..n)
            .find(|&u| (0..n).all(|x| at(&mul, u, x) == x && at(&mul, x, u) == x))
            .ok_or_else(|| RingError::NotARing("no multiplicative identity".into()))?;
        let mut neg = vec![usize::MAX; n];
        for x in 0..n {
            neg[x] = (0..n)
                .find(|&y| at(&add, x, y) == zero)
                .ok_or_else(|| RingError::NotARing(format!("{:?} has no negative", names[x])))?;
        }
        for i in 0..n {
            for j in 0..n {
                if at(&add, i, j) != at(&add, j, i) {
                    return Err(RingError::NotARing(format!(
                        "addition not commutative at {:?}, {:?}",
                        names[i], names[j]
                    )));
                }
                if at(&mul, i, j) != at(&mul, j, i) {
                    return Err(RingError::NotARing(format!(
                        "multiplication not commutative at {:?}, {:?}",
                        names[i], names[j]
                    )));
                }
                for k in 0..n {
                    if at(&add, at(&add, i, j), k) != at(&add, i, at(&add, j, k)) {
                        return Err(RingError::NotARing("addition not associative".into()));
                    }
                    if at(&mul, at(&mul, i, j), k) != at(&mul, i, at(&mul, j, k)) {
                        return Err(RingError::NotARing("multiplication not associative".into()));
                    }
                    if at(&mul, i, at(&add, j, k)) != at(&add, at(&mul, i, j), at(&mul, i, k)) {
                        return Err(RingError::NotARing("multiplication not distributive".into()));
                    }
                }
            }
        }

        // Renumber: zero to 0, one to 1, the rest keep their relative order.
        let mut perm = vec![usize::MAX; n];
        perm[zero] = 0;
        let mut next = 1;
        if one != zero {
            perm[one] = 1;
            next = 2;
        }
        for (x, slot) in perm.iter_mut().enumerate() {
            let _ = x;
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
            }
        }
        let mut new_names = vec![String::new(); n];
        let mut new_add = vec![0usize; n * n];
        let mut new_mul = vec![0usize; n * n];
        let mut new_neg = vec![0usize; n];
        for i in 0..n {
            new_names[perm[i]] = names[i].clone();
            new_neg[perm[i]] = perm[neg[i]];
            for j in 0..n {
                new_add[perm[i] * n + perm[j]] = perm[at(&add, i, j)];
                new_mul[perm[i] * n + perm[j]] = perm[at(&mul, i, j)];
            }
        }
        Ok(FinRing {
            inner: Arc::new(RingInner {
                order: n,
                names: new_names,
                add: new_add,
                mul: new_mul,
                neg: new_neg,
                one: if one == zero { 0 } else { 1 },
            }),
        })
    }

    pub fn from_tables(add_rows: &[Vec<usize>], mul_rows: &[Vec<usize>]) -> Result<FinRing, RingError> {
        let names = (0..add_rows.len()).map(|i| format!("e{i}")).collect();
        FinRing::from_named_tables(names, add_rows, mul_rows)
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.inner.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, RingError> {
        self.inner
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| RingError::UnknownName(name.to_string()))
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        self.inner.add[i * self.inner.order + j]
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.inner.mul[i * self.inner.order + j]
    }

    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        self.inner.neg[i]
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn one(&self) -> usize {
        self.inner.one
    }

    pub fn is_zero_ring(&self) -> bool {
        self.inner.order == 1
    }

    pub fn is_unit(&self, i: usize) -> bool {
        (0..self.inner.order).any(|j| self.mul(i, j) == self.one())
    }

    pub fn unit_count(&self) -> usize {
        (0..self.inner.order).filter(|&i| self.is_unit(i)).count()
    }

    pub fn additive_order(&self, i: usize) -> usize {
        let mut acc = i;
        let mut k = 1;
        while acc != 0 {
            acc = self.add(acc, i);
            k += 1;
        }
        k
    }

    /// Smallest additive subgroup containing the given elements.
    pub fn additive_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(0);
        let mut frontier: Vec<usize> = gens.to_vec();
        while let Some(x) = frontier.pop() {
            if !set.insert(x) {
                continue;
            }
            let snapshot: Vec<usize> = set.iter().copied().collect();
            for y in snapshot {
                let s = self.add(x, y);
                if !set.contains(&s) {
                    frontier.push(s);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn principal_ideal(&self, r: usize) -> Ideal {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        for s in 0..self.inner.order {
            set.insert(self.mul(s, r));
        }
        set.into_iter().collect()
    }

    pub fn is_ideal(&self, elems: &[usize]) -> bool {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        if !set.contains(&0) {
            return false;
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&self.add(a, b)) {
                    return false;
                }
            }
            for r in 0..self.inner.order {
                if !set.contains(&self.mul(r, a)) {
                    return false;
                }
            }
        }
        true
    }

    /// All ideals: closure of the principal ideals under pairwise sum.
    pub fn ideals(&self) -> Vec<Ideal> {
        let mut found: BTreeSet<Ideal> = (0..self.inner.order)
            .map(|r| self.principal_ideal(r))
            .collect();
        loop {
            let list: Vec<Ideal> = found.iter().cloned().collect();
            let mut grew = false;
            for a in &list {
                for b in &list {
                    let mut sum: BTreeSet<usize> = BTreeSet::new();
                    for &x in a {
                        for &y in b {
                            sum.insert(self.add(x, y));
                        }
                    }
                    let sum: Ideal = sum.into_iter().collect();
                    if found.insert(sum) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        found.into_iter().collect()
    }

    pub fn is_prime_ideal(&self, ideal: &[usize]) -> bool {
        let set: BTreeSet<usize> = ideal.iter().copied().collect();
        if set.len() == self.inner.order {
            return false;
        }
        for a in 0..self.inner.order {
            for b in 0..self.inner.order {
                if set.contains(&self.mul(a, b)) && !set.contains(&a) && !set.contains(&b) {
                    return false;
                }
            }
        }
        true
    }

    /// Prime ideals in lexicographic order of their element lists. Every
    /// prime of a finite commutative ring is maximal, so this is also the
    /// maximal spectrum.
    pub fn prime_ideals(&self) -> Vec<Ideal> {
        self.ideals().into_iter().filter(|i| self.is_prime_ideal(i)).collect()
    }

    pub fn is_local(&self) -> bool {
        self.prime_ideals().len() == 1
    }
}

pub type Ideal = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RingHom {
    src: FinRing,
    dst: FinRing,
    map: Vec<usize>,
}

impl RingHom {
    pub fn new(src: FinRing, dst: FinRing, map: Vec<usize>) -> Result<RingHom, RingError> {
        if map.len() != src.order() {
            return Err(RingError::NotAHom("map length mismatch".into()));
        }
        for &v in &map {
            if v >= dst.order() {
                return Err(RingError::NotAHom(format!("image index {v} out of range")));
            }
        }
        if map[src.one()] != dst.one() {
            return Err(RingError::NotAHom("does not send one to one".into()));
        }
        for i in 0..src.order() {
            for j in 0..src.order() {
                if map[src.add(i, j)] != dst.add(map[i], map[j]) {
                    return Err(RingError::NotAHom(format!(
                        "not additive at {:?} + {:?}",
                        src.name(i),
                        src.name(j)
                    )));
                }
                if map[src.mul(i, j)] != dst.mul(map[i], map[j]) {
                    return Err(RingError::NotAHom(format!(
                        "not multiplicative at {:?} * {:?}",
                        src.name(i),
                        src.name(j)
                    )));
                }
            }
        }
        Ok(RingHom { src, dst, map })
    }

    pub fn identity(r: &FinRing) -> RingHom {
        RingHom { src: r.clone(), dst: r.clone(), map: (0..r.order()).collect() }
    }

    pub fn src(&self) -> &FinRing {
        &self.src
    }

    pub fn dst(&self) -> &FinRing {
        &self.dst
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// self . first (first, then self).
    pub fn compose(&self, first: &RingHom) -> Result<RingHom, RingError> {
        if first.dst != self.src {
            return Err(RingError::ShapeMismatch);
        }
        let map = first.map.iter().map(|&i| self.map[i]).collect();
        Ok(RingHom { src: first.src.clone(), dst: self.dst.clone(), map })
    }

    pub fn kernel(&self) -> Ideal {
        (0..self.src.order()).filter(|&i| self.map[i] == 0).collect()
    }

    pub fn preimage_ideal(&self, ideal: &[usize]) -> Ideal {
        let set: BTreeSet<usize> = ideal.iter().copied().collect();
        (0..self.src.order()).filter(|&i| set.contains(&self.map[i])).collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.order()];
        for &v in &self.map {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.dst.order()];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.iter().all(|&b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.src.order() == self.dst.order() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<RingHom, RingError> {
        if !self.is_bijective() {
            return Err(RingError::NotAHom("not bijective".into()));
        }
        let mut inv = vec![0usize; self.dst.order()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        RingHom::new(self.dst.clone(), self.src.clone(), inv)
    }
}

/// Z/n with elements named by their residues.
pub fn zn(n: usize) -> FinRing {
    assert!(n >= 1);
    let names = (0..n).map(|i| i.to_string()).collect();
    let add: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let mul: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i * j) % n).collect()).collect();
    FinRing::from_named_tables(names, &add, &mul).expect("Z/n is a ring")
}

pub fn zero_ring() -> FinRing {
    zn(1)
}

/// The field with four elements 0, 1, a, a+1.
pub fn f4() -> FinRing {
    let names = vec!["0".into(), "1".into(), "a".into(), "a+1".into()];
    let add: Vec<Vec<usize>> = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
    let mul = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 2, 3],
        vec![0, 2, 3, 1],
        vec![0, 3, 1, 2],
    ];
    FinRing::from_named_tables(names, &add, &mul).expect("GF(4) is a ring")
}

/// Z/2[x] modulo x^2, the smallest ring with a nonzero nilpotent.
pub fn z2_square_zero() -> FinRing {
    let names = vec!["0".into(), "1".into(), "x".into(), "x+1".into()];
    let add: Vec<Vec<usize>> = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
    let mul = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 2, 3],
        vec![0, 2, 0, 2],
        vec![0, 3, 2, 1],
    ];
    FinRing::from_named_tables(names, &add, &mul).expect("dual numbers over Z/2")
}

/// Quotient by an ideal, with the projection. Class names are bracketed
/// least representatives.
pub fn quotient(r: &FinRing, ideal: &[usize]) -> Result<(FinRing, RingHom), RingError> {
    if !r.is_ideal(ideal) {
        return Err(RingError::NotAnIdeal(format!("{ideal:?}")));
    }
    let n = r.order();
    let iset: BTreeSet<usize> = ideal.iter().copied().collect();
    let mut rep = vec![usize::MAX; n];
    for x in 0..n {
        rep[x] = iset.iter().map(|&i| r.add(x, i)).min().expect("ideal nonempty");
    }
    let mut reps: Vec<usize> = rep.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    reps.sort_unstable();
    let class = |x: usize| reps.binary_search(&rep[x]).expect("rep listed");
    let names: Vec<String> = reps.iter().map(|&x| format!("[{}]", r.name(x))).collect();
    let add: Vec<Vec<usize>> =
        reps.iter().map(|&x| reps.iter().map(|&y| class(r.add(x, y))).collect()).collect();
    let mul: Vec<Vec<usize>> =
        reps.iter().map(|&x| reps.iter().map(|&y| class(r.mul(x, y))).collect()).collect();
    let q = FinRing::from_named_tables(names, &add, &mul)?;
    let proj_map: Vec<usize> = (0..n).map(|x| q.index_of(&format!("[{}]", r.name(rep[x]))).expect("class name")).collect();
    let proj = RingHom::new(r.clone(), q.clone(), proj_map)?;
    Ok((q, proj))
}

/// Finite product ring with componentwise operations and its projections.
/// The empty product is the zero ring.
pub fn product_many(factors: &[FinRing]) -> (FinRing, Vec<RingHom>) {
    if factors.is_empty() {
        return (zero_ring(), Vec::new());
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.order()).collect();
    let total: usize = sizes.iter().product();
    let decode = |code: usize| -> Vec<usize> {
        let mut digits = vec![0usize; sizes.len()];
        let mut c = code;
        for (d, &s) in digits.iter_mut().zip(&sizes).rev() {
            *d = c % s;
            c /= s;
        }
        digits
    };
    let encode = |digits: &[usize]| -> usize {
        digits.iter().zip(&sizes).fold(0usize, |acc, (&d, &s)| acc * s + d)
    };
    let mut names = Vec::with_capacity(total);
    for code in 0..total {
        let digits = decode(code);
        let parts: Vec<&str> =
            digits.iter().enumerate().map(|(k, &d)| factors[k].name(d)).collect();
        names.push(format!("({})", parts.join(",")));
    }
    let table = |op: &dyn Fn(&FinRing, usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..total)
            .map(|i| {
                let di = decode(i);
                (0..total)
                    .map(|j| {
                        let dj = decode(j);
                        let dr: Vec<usize> =
                            (0..sizes.len()).map(|k| op(&factors[k], di[k], dj[k])).collect();
                        encode(&dr)
                    })
                    .collect()
            })
            .collect()
    };
    let add = table(&|r, i, j| r.add(i, j));
    let mul = table(&|r, i, j| r.mul(i, j));
    let p = FinRing::from_named_tables(names.clone(), &add, &mul).expect("product of rings");
    let code_index: Vec<usize> =
        (0..total).map(|code| p.index_of(&names[code]).expect("name kept")).collect();
    let projections = factors
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mut map = vec![0usize; total];
            for code in 0..total {
                map[code_index[code]] = decode(code)[k];
            }
            RingHom::new(p.clone(), f.clone(), map).expect("projection is a hom")
        })
        .collect();
    (p, projections)
}

/// The hom into a product determined by one hom per factor.
pub fn hom_into_product(
    product: &FinRing,
    projections: &[RingHom],
    legs: &[RingHom],
) -> Result<RingHom, RingError> {
    if projections.len() != legs.len() {
        return Err(RingError::ShapeMismatch);
    }
    let src = match legs.first() {
        Some(l) => l.src().clone(),
        None => return Err(RingError::ShapeMismatch),
    };
    let mut map = Vec::with_capacity(src.order());
    for x in 0..src.order() {
        let target = (0..product.order())
            .find(|&t| {
                projections.iter().zip(legs).all(|(p, l)| p.apply(t) == l.apply(x))
            })
            .ok_or_else(|| RingError::Structural("no product element matches legs".into()))?;
        map.push(target);
    }
    RingHom::new(src, product.clone(), map)
}

/// Kernel of the localization at a prime: elements killed by something
/// outside the prime. Quotienting by it is the localization, finite rings
/// having no actual fractions to add.
pub fn localize_at_prime(r: &FinRing, prime: &[usize]) -> Result<(FinRing, RingHom), RingError> {
    if !r.is_prime_ideal(prime) {
        return Err(RingError::NotAnIdeal(format!("{prime:?} is not prime")));
    }
    let pset: BTreeSet<usize> = prime.iter().copied().collect();
    let kernel: Vec<usize> = (0..r.order())
        .filter(|&x| (0..r.order()).any(|s| !pset.contains(&s) && r.mul(x, s) == 0))
        .collect();
    if !r.is_ideal(&kernel) {
        return Err(RingError::Structural("localization kernel is not an ideal".into()));
    }
    let (loc, proj) = quotient(r, &kernel)?;
    if !loc.is_local() {
        return Err(RingError::Structural("localization is not local".into()));
    }
    Ok((loc, proj))
}

pub struct LocalFactors {
    /// One local ring and projection per prime, in prime order.
    pub factors: Vec<(FinRing, RingHom)>,
    /// The verified bijective hom onto the product of the factors.
    pub witness: RingHom,
}

/// Decomposes a finite commutative ring into its local factors and returns
/// the canonical isomorphism onto their product as a witness.
pub fn local_factors(r: &FinRing) -> Result<LocalFactors, RingError> {
    let primes = r.prime_ideals();
    let factors: Vec<(FinRing, RingHom)> = primes
        .iter()
        .map(|p| localize_at_prime(r, p))
        .collect::<Result<_, _>>()?;
    let rings: Vec<FinRing> = factors.iter().map(|(f, _)| f.clone()).collect();
    let (prod, projections) = product_many(&rings);
    let legs: Vec<RingHom> = factors.iter().map(|(_, p)| p.clone()).collect();
    let witness = if legs.is_empty() {
        // Zero spectrum forces the zero ring; the witness is its collapse.
        RingHom::new(r.clone(), prod.clone(), vec![0; r.order()])?
    } else {
        hom_into_product(&prod, &projections, &legs)?
    };
    if !witness.is_bijective() {
        return Err(RingError::Structural(
            "canonical map onto the product of local factors is not bijective".into(),
        ));
    }
    Ok(LocalFactors { factors, witness })
}

/// Primes of the target pulled back to primes of the source, as indices
/// into `src.prime_ideals()`, one per prime of the target.
pub fn spec_contraction(f: &RingHom) -> Vec<usize> {
    let src_primes = f.src().prime_ideals();
    f.dst()
        .prime_ideals()
        .iter()
        .map(|q| {
            let back = f.preimage_ideal(q);
            src_primes.iter().position(|p| *p == back).expect(
                "contraction of a prime along a hom of finite commutative rings is prime",
            )
        })
        .collect()
}

pub fn is_spec_surjective(f: &RingHom) -> bool {
    let hit: BTreeSet<usize> = spec_contraction(f).into_iter().collect();
    hit.len() == f.src().prime_ideals().len()
}

/// Expression of every element from 0, 1 and a small generator list, used
/// to enumerate homs without trying all set maps.
enum ElExpr {
    Zero,
    One,
    Gen(usize),
    Add(usize, usize),
    Mul(usize, usize),
}

struct GenPlan {
    exprs: Vec<ElExpr>,
    discovery: Vec<usize>,
    gens: Vec<usize>,
}

fn generator_plan(r: &FinRing) -> GenPlan {
    let n = r.order();
    let mut exprs: Vec<Option<ElExpr>> = (0..n).map(|_| None).collect();
    let mut discovery = Vec::with_capacity(n);
    let mut gens = Vec::new();
    exprs[r.zero()] = Some(ElExpr::Zero);
    discovery.push(r.zero());
    if r.one() != r.zero() {
        exprs[r.one()] = Some(ElExpr::One);
        discovery.push(r.one());
    }
    loop {
        // Close under both operations.
        loop {
            let known: Vec<usize> = discovery.clone();
            let mut grew = false;
            for &a in &known {
                for &b in &known {
                    for (res, expr) in
                        [(r.add(a, b), ElExpr::Add(a, b)), (r.mul(a, b), ElExpr::Mul(a, b))]
                    {
                        if exprs[res].is_none() {
                            exprs[res] = Some(expr);
                            discovery.push(res);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        match (0..n).find(|&x| exprs[x].is_none()) {
            Some(x) => {
                gens.push(x);
                exprs[x] = Some(ElExpr::Gen(gens.len() - 1));
                discovery.push(x);
            }
            None => break,
        }
    }
    GenPlan { exprs: exprs.into_iter().map(|e| e.expect("all expressed")).collect(), discovery, gens }
}

fn eval_plan(plan: &GenPlan, target: &FinRing, images: &[usize]) -> Vec<usize> {
    let mut out = vec![usize::MAX; plan.exprs.len()];
    for &x in &plan.discovery {
        out[x] = match plan.exprs[x] {
            ElExpr::Zero => target.zero(),
            ElExpr::One => target.one(),
            ElExpr::Gen(k) => images[k],
            ElExpr::Add(a, b) => target.add(out[a], out[b]),
            ElExpr::Mul(a, b) => target.mul(out[a], out[b]),
        };
    }
    out
}

/// All ring homs `a -> b`, sorted by their assignment vectors.
pub fn ring_homs(a: &FinRing, b: &FinRing, caps: &Caps) -> Result<Vec<RingHom>, RingError> {
    let plan = generator_plan(a);
    let combos = (b.order() as u128).pow(plan.gens.len() as u32);
    if combos > caps.hom_budget as u128 {
        return Err(RingError::SizeCapExceeded {
            what: "ring hom assignments",
            size: combos.min(usize::MAX as u128) as usize,
            cap: caps.hom_budget,
        });
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; plan.gens.len()];
    loop {
        let map = eval_plan(&plan, b, &images);
        if let Ok(h) = RingHom::new(a.clone(), b.clone(), map) {
            out.push(h);
        }
        // Mixed radix increment.
        let mut pos = images.len();
        loop {
            if pos == 0 {
                out.sort_by(|x, y| x.map.cmp(&y.map));
                out.dedup();
                return Ok(out);
            }
            pos -= 1;
            images[pos] += 1;
            if images[pos] < b.order() {
                break;
            }
            images[pos] = 0;
        }
    }
}

/// Searches for a ring isomorphism, returning the first witness in a
/// deterministic generator-image order, or None.
pub fn find_ring_iso(a: &FinRing, b: &FinRing, caps: &Caps) -> Result<Option<RingHom>, RingError> {
    if a.order() != b.order() {
        return Ok(None);
    }
    let signature = |r: &FinRing| {
        let mut orders: Vec<usize> = (0..r.order()).map(|i| r.additive_order(i)).collect();
        orders.sort_unstable();
        let idempotents = (0..r.order()).filter(|&i| r.mul(i, i) == i).count();
        (orders, r.unit_count(), idempotents)
    };
    if signature(a) != signature(b) {
        return Ok(None);
    }
    let plan = generator_plan(a);
    let candidates: Vec<Vec<usize>> = plan
        .gens
        .iter()
        .map(|&g| {
            (0..b.order())
                .filter(|&h| {
                    b.additive_order(h) == a.additive_order(g)
                        && b.is_unit(h) == a.is_unit(g)
                        && (b.mul(h, h) == h) == (a.mul(g, g) == g)
                })
                .collect()
        })
        .collect();
    let combos: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if combos > caps.hom_budget as u128 {
        return Err(RingError::SizeCapExceeded {
            what: "ring iso assignments",
            size: combos.min(usize::MAX as u128) as usize,
            cap: caps.hom_budget,
        });
    }
    let mut pick = vec![0usize; candidates.len()];
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    loop {
        let images: Vec<usize> = pick.iter().zip(&candidates).map(|(&k, c)| c[k]).collect();
        let map = eval_plan(&plan, b, &images);
        let mut seen = vec![false; b.order()];
        let bijective = map.iter().all(|&v| {
            let fresh = !seen[v];
            seen[v] = true;
            fresh
        });
        if bijective {
            if let Ok(h) = RingHom::new(a.clone(), b.clone(), map) {
                return Ok(Some(h));
            }
        }
        let mut pos = pick.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < candidates[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}
