//! Integer matrices, Smith normal form and finitely presented abelian groups.
//!
//! One normal-form routine backs both the ring tensor construction and the
//! homology computations, so it tracks full unimodular transforms and their
//! inverses. Matrices here are desk-sized; clarity beats asymptotics.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<i64>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Mat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.a[i * self.cols + j] = x;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + x * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Matrix-vector product (vector as column).
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for k in 0..self.cols {
            let (a, b) = (self.get(i, k), self.get(j, k));
            self.set(i, k, b);
            self.set(j, k, a);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for k in 0..self.rows {
            let (a, b) = (self.get(k, i), self.get(k, j));
            self.set(k, i, b);
            self.set(k, j, a);
        }
    }

    /// row[i] += c * row[j]
    fn add_row(&mut self, i: usize, j: usize, c: i64) {
        for k in 0..self.cols {
            let v = self.get(i, k) + c * self.get(j, k);
            self.set(i, k, v);
        }
    }

    /// col[i] += c * col[j]
    fn add_col(&mut self, i: usize, j: usize, c: i64) {
        for k in 0..self.rows {
            let v = self.get(k, i) + c * self.get(k, j);
            self.set(k, i, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self.get(i, k);
            self.set(i, k, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let v = -self.get(k, j);
            self.set(k, j, v);
        }
    }
}

/// Smith decomposition `d = u * a * v` with `u`, `v` unimodular.
/// `diag` lists the diagonal of `d`; entries satisfy `diag[i] | diag[i+1]`
/// and nonzero entries come first.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<i64>,
    pub rank: usize,
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
}

pub fn smith(input: &Mat) -> Smith {
    smith_engine(input, true, true)
}

/// Invariant factors only. Skips every transform, so relation matrices with
/// many rows stay cheap: no `rows x rows` bookkeeping is allocated.
pub fn smith_diag(input: &Mat) -> Smith {
    smith_engine(input, false, false)
}

/// Tracks only the column transform `v` (and its inverse); `u` and `u_inv`
/// come back empty. Enough to read off generator images in the cokernel.
pub fn smith_v(input: &Mat) -> Smith {
    smith_engine(input, false, true)
}

fn smith_engine(input: &Mat, want_u: bool, want_v: bool) -> Smith {
    let (m, n) = (input.rows, input.cols);
    let mut a = input.clone();
    let mut u = if want_u { Mat::identity(m) } else { Mat::zero(0, 0) };
    let mut u_inv = if want_u { Mat::identity(m) } else { Mat::zero(0, 0) };
    let mut v = if want_v { Mat::identity(n) } else { Mat::zero(0, 0) };
    let mut v_inv = if want_v { Mat::identity(n) } else { Mat::zero(0, 0) };

    // Row op on `a` is a left factor: u := E u, u_inv := u_inv E^{-1}.
    // Col op is a right factor: v := v E, v_inv := E^{-1} v_inv.
    let mut t = 0;
    while t < m.min(n) {
        // Find a pivot: the nonzero entry of smallest magnitude in the
        // remaining block, to keep coefficients tame. A unit can be taken
        // on sight; nothing beats it.
        let mut pivot: Option<(usize, usize)> = None;
        'scan_pivot: for i in t..m {
            for j in t..n {
                let x = a.get(i, j).abs();
                if x != 0 && pivot.map_or(true, |(pi, pj)| x < a.get(pi, pj).abs()) {
                    pivot = Some((i, j));
                    if x == 1 {
                        break 'scan_pivot;
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            a.swap_rows(t, pi);
            if want_u {
                u.swap_rows(t, pi);
                u_inv.swap_cols(t, pi);
            }
        }
        if pj != t {
            a.swap_cols(t, pj);
            if want_v {
                v.swap_cols(t, pj);
                v_inv.swap_rows(t, pj);
            }
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            if want_u {
                u.negate_row(t);
                u_inv.negate_col(t);
            }
        }

        let mut clean = true;
        let p = a.get(t, t);
        for i in t + 1..m {
            let q = a.get(i, t).div_euclid(p);
            if q != 0 {
                a.add_row(i, t, -q);
                if want_u {
                    u.add_row(i, t, -q);
                    u_inv.add_col(t, i, q);
                }
            }
            if a.get(i, t) != 0 {
                clean = false;
            }
        }
        for j in t + 1..n {
            let q = a.get(t, j).div_euclid(p);
            if q != 0 {
                a.add_col(j, t, -q);
                if want_v {
                    v.add_col(j, t, -q);
                    v_inv.add_row(t, j, q);
                }
            }
            if a.get(t, j) != 0 {
                clean = false;
            }
        }
        if !clean {
            // Leftovers are all smaller than the pivot; rerun this step.
            continue;
        }
        // Divisibility fixup: fold any non-multiple into this block and redo.
        let mut bad = None;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if a.get(i, j) % p != 0 {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = bad {
            a.add_row(t, i, 1);
            if want_u {
                u.add_row(t, i, 1);
                u_inv.add_col(i, t, -1);
            }
            continue;
        }
        t += 1;
    }

    let rank = t;
    let diag: Vec<i64> = (0..m.min(n)).map(|i| a.get(i, i)).collect();
    for i in 1..rank {
        debug_assert_eq!(diag[i] % diag[i - 1], 0, "divisor chain broken");
    }
    Smith { diag, rank, u, u_inv, v, v_inv }
}

/// A finitely presented abelian group: `Z^generators / rowspan(relations)`.
#[derive(Clone, Debug)]
pub struct AbPresentation {
    pub generators: usize,
    pub relations: Mat,
}

impl AbPresentation {
    pub fn new(generators: usize, relation_rows: &[Vec<i64>]) -> Self {
        let relations = if relation_rows.is_empty() {
            Mat::zero(0, generators)
        } else {
            Mat::from_rows(relation_rows)
        };
        assert_eq!(relations.cols, generators);
        AbPresentation { generators, relations }
    }

    /// Invariant factors in divisor-chain order, units dropped, one `0` per
    /// free rank. `[]` is the trivial group.
    pub fn normal_form(&self) -> Vec<i64> {
        quotient_by_rows(&self.relations, self.generators).factors_nontrivial()
    }

    pub fn is_finite(&self) -> bool {
        self.normal_form().iter().all(|&d| d != 0)
    }
}

/// Cokernel data for `Z^n / rowspan(rel)`: per-generator images in
/// normal-form coordinates.
#[derive(Clone, Debug)]
pub struct AbQuotient {
    /// One entry per coordinate, in divisor-chain order; `0` means `Z`.
    /// Units (`1`) are retained here so that `gen_rows` stays square.
    pub factors: Vec<i64>,
    /// Row `k` is the coordinate vector of generator `k`.
    gen_rows: Mat,
}

/// Present `Z^n / rowspan(rel)` in normal form. `rel` must have `n` columns.
pub fn quotient_by_rows(rel: &Mat, n: usize) -> AbQuotient {
    assert_eq!(rel.cols, n);
    let s = smith_v(rel);
    // x ~ x' iff x - x' in rowspan(rel); v^T transports rowspan(rel) onto
    // rowspan(diag), so generator e_k lands on row k of v.
    let mut factors: Vec<i64> = Vec::with_capacity(n);
    for j in 0..n {
        factors.push(if j < s.diag.len() { s.diag[j].abs() } else { 0 });
    }
    AbQuotient { factors, gen_rows: s.v }
}

impl AbQuotient {
    /// Image of the formal sum `coeffs` (over the original generators),
    /// reduced coordinatewise.
    pub fn project(&self, coeffs: &[i64]) -> Vec<i64> {
        assert_eq!(coeffs.len(), self.gen_rows.rows);
        let n = self.factors.len();
        let mut out = vec![0i64; n];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += c * self.gen_rows.get(k, j);
            }
        }
        for j in 0..n {
            out[j] = reduce(out[j], self.factors[j]);
        }
        out
    }

    pub fn gen_image(&self, k: usize) -> Vec<i64> {
        let mut coeffs = vec![0i64; self.gen_rows.rows];
        coeffs[k] = 1;
        self.project(&coeffs)
    }

    /// Factors with units dropped, nonzero first (divisor chain), zeros last.
    pub fn factors_nontrivial(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.factors.iter().copied().filter(|&d| d != 1).collect();
        out.sort_by_key(|&d| (d == 0, d));
        out
    }
}

#[inline]
fn reduce(x: i64, modulus: i64) -> i64 {
    if modulus == 0 {
        x
    } else {
        x.rem_euclid(modulus)
    }
}

/// A finite abelian group in normal-form coordinates, with its elements
/// enumerated in mixed-radix order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbGroup {
    /// All entries >= 1; order is their product.
    pub factors: Vec<i64>,
    pub order: usize,
}

impl AbGroup {
    /// Builds from quotient factors. Panics if the group is infinite; callers
    /// must check finiteness where it is not guaranteed.
    pub fn from_factors(factors: &[i64]) -> Self {
        assert!(factors.iter().all(|&d| d > 0), "infinite group");
        let order = factors.iter().product::<i64>() as usize;
        AbGroup { factors: factors.to_vec(), order }
    }

    pub fn encode(&self, coords: &[i64]) -> usize {
        assert_eq!(coords.len(), self.factors.len());
        let mut idx = 0usize;
        for (j, &c) in coords.iter().enumerate() {
            debug_assert!(0 <= c && c < self.factors[j]);
            idx = idx * self.factors[j] as usize + c as usize;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<i64> {
        let mut coords = vec![0i64; self.factors.len()];
        for j in (0..self.factors.len()).rev() {
            let f = self.factors[j] as usize;
            coords[j] = (idx % f) as i64;
            idx /= f;
        }
        debug_assert_eq!(idx, 0);
        coords
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.decode(x), self.decode(y));
        let sum: Vec<i64> = a
            .iter()
            .zip(&b)
            .zip(&self.factors)
            .map(|((&p, &q), &f)| (p + q).rem_euclid(f))
            .collect();
        self.encode(&sum)
    }

    pub fn neg(&self, x: usize) -> usize {
        let a = self.decode(x);
        let n: Vec<i64> = a.iter().zip(&self.factors).map(|(&p, &f)| (-p).rem_euclid(f)).collect();
        self.encode(&n)
    }

    pub fn zero(&self) -> usize {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_of_diag_2_3_merges_to_6() {
        // Z^2 / <2e1, 3e2> has invariant factors [6] after dropping the unit.
        let p = AbPresentation::new(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(p.normal_form(), vec![6]);
        assert!(p.is_finite());
    }

    #[test]
    fn free_rank_is_flagged_by_zero() {
        let p = AbPresentation::new(2, &[vec![2, 0]]);
        assert_eq!(p.normal_form(), vec![2, 0]);
        assert!(!p.is_finite());
    }

    #[test]
    fn trivial_group_has_empty_normal_form() {
        let p = AbPresentation::new(2, &[vec![1, 0], vec![0, 1]]);
        assert_eq!(p.normal_form(), Vec::<i64>::new());
    }

    #[test]
    fn quotient_projection_respects_relations() {
        // Z^2 / <(2,4)>: e1 has infinite order, 2*e1 + 4*e2 = 0.
        let rel = Mat::from_rows(&[vec![2, 4]]);
        let q = quotient_by_rows(&rel, 2);
        assert_eq!(q.project(&[2, 4]), vec![0; q.factors.len()]);
        let g0 = q.gen_image(0);
        assert_ne!(g0, vec![0; q.factors.len()]);
    }

    #[test]
    fn ab_group_addition_tables() {
        let g = AbGroup::from_factors(&[2, 3]);
        assert_eq!(g.order, 6);
        for x in 0..6 {
            assert_eq!(g.add(x, g.zero()), x);
            assert_eq!(g.add(x, g.neg(x)), g.zero());
            for y in 0..6 {
                assert_eq!(g.add(x, y), g.add(y, x));
            }
        }
    }

    fn small_mat() -> impl Strategy<Value = Mat> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            proptest::collection::vec(-6i64..7, m * n)
                .prop_map(move |a| {
                    let mut mat = Mat::zero(m, n);
                    for i in 0..m {
                        for j in 0..n {
                            mat.set(i, j, a[i * n + j]);
                        }
                    }
                    mat
                })
        })
    }

    proptest! {
        #[test]
        fn smith_decomposition_laws(a in small_mat()) {
            let s = smith(&a);
            // d = u a v, transforms invert, divisor chain holds.
            let d = s.u.mul(&a).mul(&s.v);
            for i in 0..a.rows {
                for j in 0..a.cols {
                    let expect = if i == j && i < s.diag.len() { s.diag[i] } else { 0 };
                    prop_assert_eq!(d.get(i, j), expect);
                }
            }
            prop_assert_eq!(s.u.mul(&s.u_inv), Mat::identity(a.rows));
            prop_assert_eq!(s.v.mul(&s.v_inv), Mat::identity(a.cols));
            for i in 0..s.rank {
                prop_assert!(s.diag[i] != 0);
                if i > 0 {
                    prop_assert_eq!(s.diag[i] % s.diag[i - 1], 0);
                }
            }
            for i in s.rank..s.diag.len() {
                prop_assert_eq!(s.diag[i], 0);
            }
        }
    }
}
