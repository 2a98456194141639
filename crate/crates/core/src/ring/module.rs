//! Finite modules over finite commutative rings, and the tensor-based
//! flatness checks built on them.
//!
//! Flatness of `f: R -> S` is decided by the ideal criterion: for every
//! ideal I of R the canonical map I (x)_R S -> S must be injective, and over
//! a finite ring there are finitely many ideals to try. Injectivity itself
//! reduces to counting, since the map always surjects onto its image.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::ring::tensor::{bilinear_core, ModuleTensor};
use crate::ring::{FinRing, Ideal, RingError, RingHom};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FinModule {
    ring: FinRing,
    order: usize,
    /// Flattened order x order addition.
    add: Vec<usize>,
    /// Flattened ring.order x order action.
    act: Vec<usize>,
    zero: usize,
}

impl FinModule {
    pub fn new(
        ring: FinRing,
        add_rows: &[Vec<usize>],
        act_rows: &[Vec<usize>],
    ) -> Result<FinModule, RingError> {
        let n = add_rows.len();
        if n == 0 {
            return Err(RingError::BadTable("module needs at least a zero".into()));
        }
        if act_rows.len() != ring.order() {
            return Err(RingError::BadTable("action needs one row per ring element".into()));
        }
        let mut add = Vec::with_capacity(n * n);
        for row in add_rows {
            if row.len() != n {
                return Err(RingError::BadTable("addition rows must be square".into()));
            }
            for &v in row {
                if v >= n {
                    return Err(RingError::BadTable(format!("addition entry {v} out of range")));
                }
                add.push(v);
            }
        }
        let mut act = Vec::with_capacity(ring.order() * n);
        for row in act_rows {
            if row.len() != n {
                return Err(RingError::BadTable("action rows must have one entry per element".into()));
            }
            for &v in row {
                if v >= n {
                    return Err(RingError::BadTable(format!("action entry {v} out of range")));
                }
                act.push(v);
            }
        }
        let at = |t: &[usize], i: usize, j: usize| t[i * n + j];
        let zero = (0..n)
            .find(|&z| (0..n).all(|x| at(&add, z, x) == x))
            .ok_or_else(|| RingError::NotARing("module has no zero".into()))?;
        for i in 0..n {
            if (0..n).all(|j| at(&add, i, j) != zero) {
                return Err(RingError::NotARing("module element has no negative".into()));
            }
            for j in 0..n {
                if at(&add, i, j) != at(&add, j, i) {
                    return Err(RingError::NotARing("module addition not commutative".into()));
                }
                for k in 0..n {
                    if at(&add, at(&add, i, j), k) != at(&add, i, at(&add, j, k)) {
                        return Err(RingError::NotARing("module addition not associative".into()));
                    }
                }
            }
        }
        let action = |r: usize, m: usize| act[r * n + m];
        for m in 0..n {
            if action(ring.one(), m) != m {
                return Err(RingError::NotARing("action of one is not the identity".into()));
            }
        }
        for r in 0..ring.order() {
            for s in 0..ring.order() {
                for m in 0..n {
                    if action(ring.mul(r, s), m) != action(r, action(s, m)) {
                        return Err(RingError::NotARing("action not multiplicative".into()));
                    }
                    if action(ring.add(r, s), m)
                        != at(&add, action(r, m), action(s, m))
                    {
                        return Err(RingError::NotARing("action not additive in scalars".into()));
                    }
                }
            }
            for m1 in 0..n {
                for m2 in 0..n {
                    if action(r, at(&add, m1, m2)) != at(&add, action(r, m1), action(r, m2)) {
                        return Err(RingError::NotARing("action not additive in elements".into()));
                    }
                }
            }
        }
        Ok(FinModule { ring, order: n, add, act, zero })
    }

    /// An ideal of R as an R-module; elements indexed by position in the
    /// sorted ideal.
    pub fn from_ideal(ring: &FinRing, ideal: &[usize]) -> Result<FinModule, RingError> {
        if !ring.is_ideal(ideal) {
            return Err(RingError::NotAnIdeal(format!("{ideal:?}")));
        }
        let pos = |x: usize| ideal.binary_search(&x).expect("ideal closed");
        let add_rows: Vec<Vec<usize>> = ideal
            .iter()
            .map(|&x| ideal.iter().map(|&y| pos(ring.add(x, y))).collect())
            .collect();
        let act_rows: Vec<Vec<usize>> = (0..ring.order())
            .map(|r| ideal.iter().map(|&x| pos(ring.mul(r, x))).collect())
            .collect();
        FinModule::new(ring.clone(), &add_rows, &act_rows)
    }

    pub fn regular(ring: &FinRing) -> FinModule {
        let all: Vec<usize> = (0..ring.order()).collect();
        FinModule::from_ideal(ring, &all).expect("ring as module over itself")
    }

    /// R/I as an R-module; elements are classes ordered by least member.
    pub fn quotient_module(ring: &FinRing, ideal: &[usize]) -> Result<FinModule, RingError> {
        if !ring.is_ideal(ideal) {
            return Err(RingError::NotAnIdeal(format!("{ideal:?}")));
        }
        let n = ring.order();
        let mut rep = vec![usize::MAX; n];
        for x in 0..n {
            rep[x] = ideal.iter().map(|&i| ring.add(x, i)).min().expect("nonempty");
        }
        let reps: Vec<usize> = rep.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let class = |x: usize| reps.binary_search(&rep[x]).expect("rep listed");
        let add_rows: Vec<Vec<usize>> = reps
            .iter()
            .map(|&x| reps.iter().map(|&y| class(ring.add(x, y))).collect())
            .collect();
        let act_rows: Vec<Vec<usize>> = (0..n)
            .map(|r| reps.iter().map(|&x| class(ring.mul(r, x))).collect())
            .collect();
        FinModule::new(ring.clone(), &add_rows, &act_rows)
    }

    pub fn direct_sum(&self, other: &FinModule) -> Result<FinModule, RingError> {
        if self.ring != other.ring {
            return Err(RingError::ShapeMismatch);
        }
        let (n, m) = (self.order, other.order);
        let code = |i: usize, j: usize| i * m + j;
        let add_rows: Vec<Vec<usize>> = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| {
                        code(self.add(x / m, y / m), other.add(x % m, y % m))
                    })
                    .collect()
            })
            .collect();
        let act_rows: Vec<Vec<usize>> = (0..self.ring.order())
            .map(|r| (0..n * m).map(|x| code(self.act(r, x / m), other.act(r, x % m))).collect())
            .collect();
        FinModule::new(self.ring.clone(), &add_rows, &act_rows)
    }

    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.order + j]
    }

    #[inline]
    pub fn act(&self, r: usize, m: usize) -> usize {
        self.act[r * self.order + m]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }
}

/// M (x)_R S along `f: R -> S`, as an abelian group with pure-sum data.
pub fn module_tensor(m: &FinModule, f: &RingHom, caps: &Caps) -> Result<ModuleTensor, RingError> {
    if m.ring() != f.src() {
        return Err(RingError::ShapeMismatch);
    }
    let s = f.dst();
    let gens = m.order() * s.order();
    let e = |i: usize, y: usize| i * s.order() + y;
    let mut balance = Vec::new();
    for r in 0..f.src().order() {
        for i in 0..m.order() {
            for y in 0..s.order() {
                let mut row = vec![0i64; gens];
                row[e(m.act(r, i), y)] += 1;
                row[e(i, s.mul(f.apply(r), y))] -= 1;
                if row.iter().any(|&v| v != 0) {
                    balance.push(row);
                }
            }
        }
    }
    let core = bilinear_core(
        m.order(),
        s.order(),
        |i, j| m.add(i, j),
        |i, j| s.add(i, j),
        balance,
        caps,
    )?;
    Ok(ModuleTensor { core })
}

/// None when `f` is flat; otherwise the least ideal whose tensored
/// inclusion into S fails to stay injective.
pub fn flat_witness(f: &RingHom, caps: &Caps) -> Result<Option<Ideal>, RingError> {
    let (r, s) = (f.src(), f.dst());
    for ideal in r.ideals() {
        // The zero ideal tensors to zero and the unit ideal to S itself, so
        // neither can break injectivity; the unit ideal is also the priciest
        // probe by far.
        if ideal.len() <= 1 || ideal.len() == r.order() {
            continue;
        }
        let m = FinModule::from_ideal(r, &ideal)?;
        let t = module_tensor(&m, f, caps)?;
        let mut gens = Vec::new();
        for &x in &ideal {
            for y in 0..s.order() {
                gens.push(s.mul(f.apply(x), y));
            }
        }
        let image = s.additive_closure(&gens);
        debug_assert!(image.len() <= t.order());
        if image.len() != t.order() {
            return Ok(Some(ideal));
        }
    }
    Ok(None)
}

pub fn is_flat(f: &RingHom, caps: &Caps) -> Result<bool, RingError> {
    Ok(flat_witness(f, caps)?.is_none())
}

pub fn is_faithfully_flat(f: &RingHom, caps: &Caps) -> Result<bool, RingError> {
    Ok(is_flat(f, caps)? && crate::ring::is_spec_surjective(f))
}

/// Whether `carry: M_x -> M_y` exhibits M_y as M_x (x)_{O_x} O_y along the
/// restriction `res: O_x -> O_y`. `carry` must be additive and semilinear.
pub fn is_quasi_coherent_pair(
    mx: &FinModule,
    res: &RingHom,
    my: &FinModule,
    carry: &[usize],
    caps: &Caps,
) -> Result<bool, RingError> {
    if mx.ring() != res.src() || my.ring() != res.dst() || carry.len() != mx.order() {
        return Err(RingError::ShapeMismatch);
    }
    for i in 0..mx.order() {
        for j in 0..mx.order() {
            if carry[mx.add(i, j)] != my.add(carry[i], carry[j]) {
                return Err(RingError::NotAHom("carry map is not additive".into()));
            }
        }
        for r in 0..res.src().order() {
            if carry[mx.act(r, i)] != my.act(res.apply(r), carry[i]) {
                return Err(RingError::NotAHom("carry map is not semilinear".into()));
            }
        }
    }
    let t = module_tensor(mx, res, caps)?;
    if t.order() != my.order() {
        return Ok(false);
    }
    let mut seen = vec![false; my.order()];
    for code in 0..t.order() {
        let v = t.core.eval(
            code,
            my.zero(),
            |i, y| my.act(y, carry[i]),
            |a, b| my.add(*a, *b),
        );
        if seen[v] {
            return Ok(false);
        }
        seen[v] = true;
    }
    Ok(seen.iter().all(|&b| b))
}
