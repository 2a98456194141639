//! Tensor products over a base ring, presented as integer cokernels.
//!
//! Both the module tensor M (x)_R S and the ring tensor A (x)_R B start from
//! the free abelian group on pure symbols, cut down by additivity in each
//! slot and the balancing relations. The Smith normal form of the relation
//! rows gives the underlying group exactly; a breadth-first sweep over pure
//! images then records, for every element, one expression as a sum of pures,
//! which is what induced maps are evaluated through.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::intmat::{quotient_by_rows, AbGroup, Mat};
use crate::ring::{FinRing, RingError, RingHom};

/// Underlying abelian group of a two-slot tensor, with pure-sum expressions.
#[derive(Debug)]
pub struct BilinearCore {
    pub left_size: usize,
    pub right_size: usize,
    pub group: AbGroup,
    /// Group code of each pure symbol, indexed left * right_size + right.
    pure_codes: Vec<usize>,
    /// Per group code: predecessor code and the pure pair added last.
    chain: Vec<Option<(usize, usize, usize)>>,
}

impl BilinearCore {
    pub fn order(&self) -> usize {
        self.group.order
    }

    pub fn pure(&self, a: usize, b: usize) -> usize {
        self.pure_codes[a * self.right_size + b]
    }

    /// One fixed expression of the element as a multiset of pure pairs.
    pub fn decompose(&self, code: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut cur = code;
        while let Some((prev, a, b)) = self.chain[cur] {
            out.push((a, b));
            cur = prev;
        }
        debug_assert_eq!(cur, self.group.zero());
        out.reverse();
        out
    }

    /// Evaluates the additive extension of `h` on pure pairs.
    pub fn eval<V: Clone>(
        &self,
        code: usize,
        zero: V,
        mut h: impl FnMut(usize, usize) -> V,
        mut add: impl FnMut(&V, &V) -> V,
    ) -> V {
        let mut acc = zero;
        for (a, b) in self.decompose(code) {
            let v = h(a, b);
            acc = add(&acc, &v);
        }
        acc
    }
}

/// Builds the group from slot sizes, slot additions and extra relation rows
/// (the balancing relations, which depend on the flavor of tensor).
pub fn bilinear_core(
    left_size: usize,
    right_size: usize,
    left_add: impl Fn(usize, usize) -> usize,
    right_add: impl Fn(usize, usize) -> usize,
    balance_rows: Vec<Vec<i64>>,
    caps: &Caps,
) -> Result<BilinearCore, RingError> {
    let gens = left_size * right_size;
    if gens > caps.tensor_generators {
        return Err(RingError::SizeCapExceeded {
            what: "tensor generators",
            size: gens,
            cap: caps.tensor_generators,
        });
    }
    let e = |a: usize, b: usize| a * right_size + b;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for a in 0..left_size {
        for a2 in 0..left_size {
            for b in 0..right_size {
                let mut row = vec![0i64; gens];
                row[e(left_add(a, a2), b)] += 1;
                row[e(a, b)] -= 1;
                row[e(a2, b)] -= 1;
                rows.push(row);
            }
        }
    }
    for a in 0..left_size {
        for b in 0..right_size {
            for b2 in 0..right_size {
                let mut row = vec![0i64; gens];
                row[e(a, right_add(b, b2))] += 1;
                row[e(a, b)] -= 1;
                row[e(a, b2)] -= 1;
                rows.push(row);
            }
        }
    }
    for row in &balance_rows {
        assert_eq!(row.len(), gens, "balance row width");
    }
    rows.extend(balance_rows);
    let quot = quotient_by_rows(&Mat::from_rows(&rows), gens);
    if quot.factors.iter().any(|&d| d == 0) {
        return Err(RingError::Structural(
            "tensor of finite pieces came out infinite".into(),
        ));
    }
    let group = AbGroup::from_factors(&quot.factors);
    let pure_codes: Vec<usize> =
        (0..gens).map(|k| group.encode(&quot.gen_image(k))).collect();
    // Pures generate, so a sweep from zero reaches everything.
    let mut chain: Vec<Option<(usize, usize, usize)>> = vec![None; group.order];
    let mut visited = vec![false; group.order];
    visited[group.zero()] = true;
    let mut frontier = vec![group.zero()];
    while let Some(c) = frontier.pop() {
        for a in 0..left_size {
            for b in 0..right_size {
                let next = group.add(c, pure_codes[e(a, b)]);
                if !visited[next] {
                    visited[next] = true;
                    chain[next] = Some((c, a, b));
                    frontier.push(next);
                }
            }
        }
    }
    if visited.iter().any(|&v| !v) {
        return Err(RingError::Structural("pure tensors failed to generate".into()));
    }
    Ok(BilinearCore { left_size, right_size, group, pure_codes, chain })
}

/// M (x)_R S for a finite module M and an algebra S given by `f: R -> S`.
#[derive(Debug)]
pub struct ModuleTensor {
    pub core: BilinearCore,
}

impl ModuleTensor {
    pub fn order(&self) -> usize {
        self.core.order()
    }
}

/// A (x)_R B as a finite commutative ring, together with the two pushout
/// legs and evaluation of induced homs through pure-sum expressions.
#[derive(Debug)]
pub struct TensorRing {
    core: BilinearCore,
    ring: FinRing,
    left_inject: RingHom,
    right_inject: RingHom,
    to_left: RingHom,
    to_right: RingHom,
    /// ring element index per group code and back.
    code_to_ring: Vec<usize>,
    ring_to_code: Vec<usize>,
}

impl TensorRing {
    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    /// The leg A -> A(x)B, a |-> a(x)1.
    pub fn left_inject(&self) -> &RingHom {
        &self.left_inject
    }

    /// The leg B -> A(x)B, b |-> 1(x)b.
    pub fn right_inject(&self) -> &RingHom {
        &self.right_inject
    }

    pub fn pure(&self, a: usize, b: usize) -> usize {
        self.code_to_ring[self.core.pure(a, b)]
    }

    pub fn decompose(&self, element: usize) -> Vec<(usize, usize)> {
        self.core.decompose(self.ring_to_code[element])
    }

    /// The hom out of the pushout determined by a commuting cocone.
    pub fn induce(&self, on_left: &RingHom, on_right: &RingHom) -> Result<RingHom, RingError> {
        if on_left.src() != self.to_left.dst() || on_right.src() != self.to_right.dst() {
            return Err(RingError::ShapeMismatch);
        }
        if on_left.dst() != on_right.dst() {
            return Err(RingError::ShapeMismatch);
        }
        let around_left = on_left.compose(&self.to_left)?;
        let around_right = on_right.compose(&self.to_right)?;
        if around_left != around_right {
            return Err(RingError::Structural("cocone does not commute over the base".into()));
        }
        let c = on_left.dst();
        let map: Vec<usize> = (0..self.ring.order())
            .map(|t| {
                self.core.eval(
                    self.ring_to_code[t],
                    c.zero(),
                    |a, b| c.mul(on_left.apply(a), on_right.apply(b)),
                    |x, y| c.add(*x, *y),
                )
            })
            .collect();
        RingHom::new(self.ring.clone(), c.clone(), map)
    }
}

/// Builds A (x)_R B from the two algebra structure homs out of R.
pub fn tensor_rings(f: &RingHom, g: &RingHom, caps: &Caps) -> Result<TensorRing, RingError> {
    if f.src() != g.src() {
        return Err(RingError::ShapeMismatch);
    }
    let (a, b, r) = (f.dst(), g.dst(), f.src());
    let e = |x: usize, y: usize| x * b.order() + y;
    let gens = a.order() * b.order();
    let mut balance = Vec::new();
    for s in 0..r.order() {
        for x in 0..a.order() {
            for y in 0..b.order() {
                let mut row = vec![0i64; gens];
                row[e(a.mul(f.apply(s), x), y)] += 1;
                row[e(x, b.mul(g.apply(s), y))] -= 1;
                if row.iter().any(|&v| v != 0) {
                    balance.push(row);
                }
            }
        }
    }
    let core = bilinear_core(
        a.order(),
        b.order(),
        |x, y| a.add(x, y),
        |x, y| b.add(x, y),
        balance,
        caps,
    )?;
    let order = core.order();
    if order > caps.ring_order {
        return Err(RingError::SizeCapExceeded {
            what: "tensor ring order",
            size: order,
            cap: caps.ring_order,
        });
    }
    // Multiplication through pure expressions: products of sums of pures.
    let mul_codes = |t1: usize, t2: usize| -> usize {
        let d1 = core.decompose(t1);
        let d2 = core.decompose(t2);
        let mut acc = core.group.zero();
        for &(a1, b1) in &d1 {
            for &(a2, b2) in &d2 {
                acc = core.group.add(acc, core.pure(a.mul(a1, a2), b.mul(b1, b2)));
            }
        }
        acc
    };
    let names: Vec<String> = (0..order).map(|c| format!("t{c}")).collect();
    let add_rows: Vec<Vec<usize>> =
        (0..order).map(|i| (0..order).map(|j| core.group.add(i, j)).collect()).collect();
    let mul_rows: Vec<Vec<usize>> =
        (0..order).map(|i| (0..order).map(|j| mul_codes(i, j)).collect()).collect();
    let ring = FinRing::from_named_tables(names, &add_rows, &mul_rows)?;
    let code_to_ring: Vec<usize> =
        (0..order).map(|c| ring.index_of(&format!("t{c}")).expect("tensor name")).collect();
    let mut ring_to_code = vec![0usize; order];
    for (c, &i) in code_to_ring.iter().enumerate() {
        ring_to_code[i] = c;
    }
    let left_inject = RingHom::new(
        a.clone(),
        ring.clone(),
        (0..a.order()).map(|x| code_to_ring[core.pure(x, b.one())]).collect(),
    )?;
    let right_inject = RingHom::new(
        b.clone(),
        ring.clone(),
        (0..b.order()).map(|y| code_to_ring[core.pure(a.one(), y)]).collect(),
    )?;
    Ok(TensorRing {
        core,
        ring,
        left_inject,
        right_inject,
        to_left: f.clone(),
        to_right: g.clone(),
        code_to_ring,
        ring_to_code,
    })
}

/// f is an epimorphism of rings iff multiplication S (x)_R S -> S is an
/// isomorphism.
pub fn is_epi(f: &RingHom, caps: &Caps) -> Result<bool, RingError> {
    let t = tensor_rings(f, f, caps)?;
    let id = RingHom::identity(f.dst());
    let mult = t.induce(&id, &id)?;
    Ok(mult.is_bijective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{quotient, zn};

    fn mod_projection(n: usize, ideal: &[usize]) -> RingHom {
        quotient(&zn(n), ideal).unwrap().1
    }

    #[test]
    fn coprime_quotients_tensor_to_zero() {
        // Z/2 (x)_{Z/6} Z/3 = 0.
        let f = mod_projection(6, &[0, 2, 4]);
        let g = mod_projection(6, &[0, 3]);
        let t = tensor_rings(&f, &g, &Caps::default()).unwrap();
        assert_eq!(t.ring().order(), 1);
    }

    #[test]
    fn tensor_with_self_along_quotient_is_identity_sized() {
        // Z/2 (x)_{Z/6} Z/2 = Z/2.
        let f = mod_projection(6, &[0, 2, 4]);
        let t = tensor_rings(&f, &f, &Caps::default()).unwrap();
        assert_eq!(t.ring().order(), 2);
        let id = RingHom::identity(f.dst());
        let mult = t.induce(&id, &id).unwrap();
        assert!(mult.is_bijective());
    }

    #[test]
    fn tensor_over_self_recovers_the_ring() {
        // Z/6 (x)_{Z/6} Z/6 = Z/6, with both legs the identity.
        let id = RingHom::identity(&zn(6));
        let t = tensor_rings(&id, &id, &Caps::default()).unwrap();
        assert_eq!(t.ring().order(), 6);
        assert!(t.left_inject().is_bijective());
        assert_eq!(t.left_inject().map(), t.right_inject().map());
    }

    #[test]
    fn legs_commute_with_the_base() {
        let f = mod_projection(6, &[0, 2, 4]);
        let g = mod_projection(6, &[0, 3]);
        let t = tensor_rings(&f, &g, &Caps::default()).unwrap();
        let through_left = t.left_inject().compose(&f).unwrap();
        let through_right = t.right_inject().compose(&g).unwrap();
        assert_eq!(through_left, through_right, "pushout square commutes");
    }

    #[test]
    fn induce_rejects_non_commuting_cocones() {
        // Both legs of Z/2 (x)_{Z/2 x Z/2} Z/2 are projections; identity
        // cocone legs disagree on the base, so no induced hom exists.
        let (_, projs) = crate::ring::product_many(&[zn(2), zn(2)]);
        let t = tensor_rings(&projs[0], &projs[1], &Caps::default()).unwrap();
        let id = RingHom::identity(&zn(2));
        let err = t.induce(&id, &id).unwrap_err();
        assert!(matches!(err, RingError::Structural(_)));
    }

    #[test]
    fn quotient_maps_are_epi() {
        assert!(is_epi(&mod_projection(6, &[0, 2, 4]), &Caps::default()).unwrap());
        assert!(is_epi(&mod_projection(6, &[0, 3]), &Caps::default()).unwrap());
        assert!(is_epi(&RingHom::identity(&zn(6)), &Caps::default()).unwrap());
    }

    #[test]
    fn inclusion_into_a_product_is_not_epi() {
        // Z/2 -> Z/2 x Z/2 diagonally: tensor has order 4, not 2.
        let (p, projs) = crate::ring::product_many(&[zn(2), zn(2)]);
        let diag = crate::ring::hom_into_product(
            &p,
            &projs,
            &[RingHom::identity(&zn(2)), RingHom::identity(&zn(2))],
        )
        .unwrap();
        assert!(!is_epi(&diag, &Caps::default()).unwrap());
    }

    #[test]
    fn tensor_respects_the_generator_cap() {
        let mut caps = Caps::default();
        caps.tensor_generators = 10;
        let id = RingHom::identity(&zn(6));
        let err = tensor_rings(&id, &id, &caps).unwrap_err();
        assert!(matches!(err, RingError::SizeCapExceeded { .. }));
    }
}
