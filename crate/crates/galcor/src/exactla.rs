//! Exact linear algebra over K: RREF, kernels, solving, canonical subspaces,
//! generated subalgebras and centralizers inside End_K(L).
//!
//! Subspaces are stored by their reduced row echelon basis with monic pivots,
//! so equal subspaces have identical representations.

use crate::error::{Error, Result};
use crate::ring::Field;

/// A dense rows x cols matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<F::Elem>,
}

impl<F: Field> Mat<F> {
    pub fn new(rows: usize, cols: usize, entries: Vec<F::Elem>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Mat { rows, cols, entries }
    }

    pub fn zero(field: &F, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        let _ = field;
        Mat { rows: r, cols: c, entries }
    }

    pub fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut F::Elem {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| field.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| field.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zero(field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = field.mul(a, other.at(k, j));
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = field.add(&cur, &t);
                }
            }
        }
        out
    }

    pub fn apply(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = field.zero();
                for (j, x) in v.iter().enumerate() {
                    if field.is_zero(x) {
                        continue;
                    }
                    acc = field.add(&acc, &field.mul(self.at(i, j), x));
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, field: &F, other: &Self) -> Self {
        self.mul(field, other).sub(field, &other.mul(field, self))
    }

    /// Flattens row-major into a vector of length rows*cols.
    pub fn flatten(&self) -> Vec<F::Elem> {
        self.entries.clone()
    }

    pub fn from_flat(field: &F, n: usize, v: &[F::Elem]) -> Self {
        assert_eq!(v.len(), n * n, "flat length mismatch");
        let _ = field;
        Mat {
            rows: n,
            cols: n,
            entries: v.to_vec(),
        }
    }

    pub fn transpose(&self, field: &F) -> Self {
        let mut out = Self::zero(field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }
}

/// Row echelon state: RREF rows with monic pivots plus their pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F: Field> {
    pub rows: Vec<Vec<F::Elem>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl<F: Field> Rref<F> {
    pub fn new(cols: usize) -> Self {
        Rref {
            rows: vec![],
            pivots: vec![],
            cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the accumulated rows; returns the residual.
    pub fn reduce(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if field.is_zero(&c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x = field.sub(x, &field.mul(&c, y));
            }
        }
        v
    }

    /// Reduces `v` and also returns the coefficients used per pivot row.
    pub fn reduce_with_coeffs(&self, field: &F, v: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
        let mut v = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if !field.is_zero(&c) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = field.sub(x, &field.mul(&c, y));
                }
            }
            coeffs.push(c);
        }
        (v, coeffs)
    }

    /// Inserts a vector, keeping reduced echelon form. Returns true when the
    /// rank grew.
    pub fn insert(&mut self, field: &F, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let r = self.reduce(field, v);
        let pivot = match r.iter().position(|x| !field.is_zero(x)) {
            Some(p) => p,
            None => return false,
        };
        let inv = field.inv(&r[pivot]).expect("nonzero pivot");
        let new_row: Vec<F::Elem> = r.iter().map(|x| field.mul(x, &inv)).collect();
        // clear the new pivot column in the existing rows
        for row in self.rows.iter_mut() {
            let c = row[pivot].clone();
            if field.is_zero(&c) {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&new_row) {
                *x = field.sub(x, &field.mul(&c, y));
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, new_row);
        self.pivots.insert(at, pivot);
        true
    }

    pub fn contains(&self, field: &F, v: &[F::Elem]) -> bool {
        self.reduce(field, v).iter().all(|x| field.is_zero(x))
    }
}

/// A canonical K-subspace of an ambient coordinate space.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    rref: Rref<F>,
}

impl<F: Field> Subspace<F> {
    pub fn empty(ambient: usize) -> Self {
        Subspace {
            rref: Rref::new(ambient),
        }
    }

    pub fn from_vectors(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        let mut rref = Rref::new(ambient);
        for v in vectors {
            rref.insert(field, v);
        }
        Subspace { rref }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let vectors: Vec<Vec<F::Elem>> = (0..ambient)
            .map(|i| unit_vector(field, ambient, i))
            .collect();
        Self::from_vectors(field, ambient, &vectors)
    }

    pub fn ambient(&self) -> usize {
        self.rref.cols
    }

    pub fn dim(&self) -> usize {
        self.rref.rank()
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rref.rows
    }

    pub fn rref(&self) -> &Rref<F> {
        &self.rref
    }

    pub fn contains_vec(&self, field: &F, v: &[F::Elem]) -> bool {
        self.rref.contains(field, v)
    }

    pub fn contains(&self, field: &F, other: &Self) -> bool {
        other.basis().iter().all(|v| self.contains_vec(field, v))
    }

    pub fn sum(&self, field: &F, other: &Self) -> Result<Self> {
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "subspace sum: ambient {} vs {}",
                self.ambient(),
                other.ambient()
            )));
        }
        let mut rref = self.rref.clone();
        for v in other.basis() {
            rref.insert(field, v);
        }
        Ok(Subspace { rref })
    }

    /// Intersection via the kernel of [U^T | V^T].
    pub fn intersect(&self, field: &F, other: &Self) -> Result<Self> {
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "subspace intersection: ambient {} vs {}",
                self.ambient(),
                other.ambient()
            )));
        }
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Ok(Self::empty(self.ambient()));
        }
        // columns: a coefficients for U rows, b for V rows
        let n = self.ambient();
        let mut m = Mat::zero(field, n, a + b);
        for (j, u) in self.basis().iter().enumerate() {
            for i in 0..n {
                *m.at_mut(i, j) = u[i].clone();
            }
        }
        for (j, v) in other.basis().iter().enumerate() {
            for i in 0..n {
                *m.at_mut(i, a + j) = field.neg(&v[i]);
            }
        }
        let ker = kernel(field, &m);
        let mut vectors = Vec::with_capacity(ker.len());
        for kv in &ker {
            // element = sum of alpha_j * u_j
            let mut w = vec![field.zero(); n];
            for (j, u) in self.basis().iter().enumerate() {
                if field.is_zero(&kv[j]) {
                    continue;
                }
                for i in 0..n {
                    w[i] = field.add(&w[i], &field.mul(&kv[j], &u[i]));
                }
            }
            vectors.push(w);
        }
        Ok(Self::from_vectors(field, n, &vectors))
    }
}

pub fn unit_vector<F: Field>(field: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// Reduced row echelon form; returns the echelon state.
pub fn rref<F: Field>(field: &F, m: &Mat<F>) -> Rref<F> {
    let mut r = Rref::new(m.cols);
    for i in 0..m.rows {
        r.insert(field, m.row(i));
    }
    r
}

pub fn rank<F: Field>(field: &F, m: &Mat<F>) -> usize {
    rref(field, m).rank()
}

/// Canonical basis of the kernel (RREF of the free-variable basis).
pub fn kernel<F: Field>(field: &F, m: &Mat<F>) -> Vec<Vec<F::Elem>> {
    let r = rref(field, m);
    let pivot_set: std::collections::BTreeSet<usize> = r.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); m.cols];
        v[free] = field.one();
        for (row, &p) in r.rows.iter().zip(&r.pivots) {
            v[p] = field.neg(&row[free]);
        }
        basis.push(v);
    }
    // canonicalize
    let sub = Subspace::from_vectors(field, m.cols, &basis);
    sub.rref.rows
}

/// Solves A x = b; `None` when inconsistent.
pub fn solve<F: Field>(field: &F, a: &Mat<F>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    // run RREF on [A | b]
    let mut aug = Mat::zero(field, a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            *aug.at_mut(i, j) = a.at(i, j).clone();
        }
        *aug.at_mut(i, a.cols) = b[i].clone();
    }
    let r = rref(field, &aug);
    let mut x = vec![field.zero(); a.cols];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        if p == a.cols {
            return None; // pivot in the augmented column
        }
        x[p] = row[a.cols].clone();
    }
    // verification is cheap relative to elimination
    let check = a.apply(field, &x);
    if check
        .iter()
        .zip(b)
        .all(|(u, v)| field.eq(u, v))
    {
        Some(x)
    } else {
        None
    }
}

/// Smallest product-closed subspace containing `gens` and the identity,
/// inside the flattened n x n matrix space.
pub fn algebra_closure<F: Field>(field: &F, n: usize, gens: &[Mat<F>]) -> Subspace<F> {
    let mut span = Rref::new(n * n);
    span.insert(field, &Mat::identity(field, n).flatten());
    for g in gens {
        assert_eq!((g.rows, g.cols), (n, n), "generators must be n x n");
        span.insert(field, &g.flatten());
    }
    loop {
        let mats: Vec<Mat<F>> = span
            .rows
            .iter()
            .map(|v| Mat::from_flat(field, n, v))
            .collect();
        let before = span.rank();
        let snapshot = mats.clone();
        for x in &snapshot {
            for y in &mats {
                let prod = x.mul(field, y).flatten();
                span.insert(field, &prod);
            }
        }
        if span.rank() == before {
            break;
        }
        if span.rank() == n * n {
            break;
        }
    }
    Subspace { rref: span }
}

/// Solution space of Xs = sX for all s, intersected with `within`
/// (`None` = the full matrix algebra). Solved in the coordinates of
/// `within`, so the cost scales with its dimension.
pub fn centralizer<F: Field>(
    field: &F,
    n: usize,
    s_list: &[Mat<F>],
    within: Option<&Subspace<F>>,
) -> Subspace<F> {
    let full;
    let within = match within {
        Some(w) => {
            assert_eq!(w.ambient(), n * n, "ambient mismatch");
            w
        }
        None => {
            full = Subspace::full(field, n * n);
            &full
        }
    };
    let dim = within.dim();
    if dim == 0 {
        return Subspace::empty(n * n);
    }
    let basis_mats: Vec<Mat<F>> = within
        .basis()
        .iter()
        .map(|v| Mat::from_flat(field, n, v))
        .collect();
    // rows: for each s, the commutator [B_j, s] flattened, as columns per j
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    let mut cond_cols: Vec<Vec<F::Elem>> = Vec::with_capacity(dim);
    for s in s_list {
        cond_cols.clear();
        for b in &basis_mats {
            cond_cols.push(b.commutator(field, s).flatten());
        }
        for coord in 0..n * n {
            let row: Vec<F::Elem> = cond_cols.iter().map(|c| c[coord].clone()).collect();
            if row.iter().all(|x| field.is_zero(x)) {
                continue;
            }
            rows.push(row);
        }
    }
    let m = Mat::from_rows(field, rows);
    let coeff_kernel = if m.rows == 0 {
        (0..dim).map(|i| unit_vector(field, dim, i)).collect()
    } else {
        kernel(field, &m)
    };
    // map coefficient vectors back into the ambient space
    let mut vectors = Vec::with_capacity(coeff_kernel.len());
    for coeffs in &coeff_kernel {
        let mut w = vec![field.zero(); n * n];
        for (j, b) in within.basis().iter().enumerate() {
            if field.is_zero(&coeffs[j]) {
                continue;
            }
            for i in 0..n * n {
                w[i] = field.add(&w[i], &field.mul(&coeffs[j], &b[i]));
            }
        }
        vectors.push(w);
    }
    Subspace::from_vectors(field, n * n, &vectors)
}

/// Checks that the subspace of flattened n x n matrices is product closed.
pub fn is_product_closed<F: Field>(field: &F, n: usize, a: &Subspace<F>) -> bool {
    let mats: Vec<Mat<F>> = a.basis().iter().map(|v| Mat::from_flat(field, n, v)).collect();
    for x in &mats {
        for y in &mats {
            if !a.contains_vec(field, &x.mul(field, y).flatten()) {
                return false;
            }
        }
    }
    true
}

/// Z(A) = centralizer of A's basis intersected with A.
/// Errors when A is not product closed.
pub fn center<F: Field>(field: &F, n: usize, a: &Subspace<F>) -> Result<Subspace<F>> {
    if !is_product_closed(field, n, a) {
        return Err(Error::NotAnAlgebra(
            "basis pair products leave the subspace".into(),
        ));
    }
    let mats: Vec<Mat<F>> = a.basis().iter().map(|v| Mat::from_flat(field, n, v)).collect();
    Ok(centralizer(field, n, &mats, Some(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{BaseField, BaseFieldDesc, FiniteFieldDesc, Limits};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3x() -> BaseField {
        BaseField::new(
            &BaseFieldDesc {
                ff: FiniteFieldDesc::prime(3),
                variables: vec!["x".into()],
            },
            Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_of_1x2() {
        // kernel of [x, -1] over F_3(x) is spanned by (1, x)
        let k = f3x();
        let x = k.var(0);
        let m = Mat::from_rows(&k, vec![vec![x.clone(), k.from_int(-1)]]);
        let ker = kernel(&k, &m);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], vec![k.one(), x]);
    }

    #[test]
    fn rank_identity() {
        let k = f3x();
        assert_eq!(rank(&k, &Mat::identity(&k, 6)), 6);
    }

    #[test]
    fn rref_detects_dependent_rows() {
        // [[x, 1], [x^2, x]]: second row = x * first row
        let k = f3x();
        let x = k.var(0);
        let x2 = k.mul(&x, &x);
        let m = Mat::from_rows(&k, vec![vec![x.clone(), k.one()], vec![x2, x.clone()]]);
        assert_eq!(rank(&k, &m), 1);
        // oracle: row2 - x*row1 = 0
        let diff0 = k.sub(m.at(1, 0), &k.mul(&x, m.at(0, 0)));
        let diff1 = k.sub(m.at(1, 1), &k.mul(&x, m.at(0, 1)));
        assert!(k.is_zero(&diff0) && k.is_zero(&diff1));
    }

    #[test]
    fn subspace_ops() {
        let k = f3x();
        let x = k.var(0);
        let e1 = unit_vector(&k, 2, 0);
        let e2 = unit_vector(&k, 2, 1);
        let u = Subspace::from_vectors(&k, 2, &[e1.clone()]);
        let v = Subspace::from_vectors(&k, 2, &[e2.clone()]);
        assert_eq!(u.sum(&k, &v).unwrap().dim(), 2);
        assert_eq!(u.intersect(&k, &u).unwrap(), u);
        // span{(1,x)} ∩ span{(1,x+1)} = 0, by the stacked-kernel construction
        let s1 = Subspace::from_vectors(&k, 2, &[vec![k.one(), x.clone()]]);
        let s2 = Subspace::from_vectors(&k, 2, &[vec![k.one(), k.add(&x, &k.one())]]);
        assert_eq!(s1.intersect(&k, &s2).unwrap().dim(), 0);
    }

    #[test]
    fn grassmann_dimension_formula() {
        let k = f3x();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 4;
        for _ in 0..25 {
            let du = rng.gen_range(0..=n);
            let dv = rng.gen_range(0..=n);
            let mk = |d: usize, rng: &mut ChaCha8Rng| {
                let vs: Vec<Vec<_>> = (0..d)
                    .map(|_| (0..n).map(|_| k.sample_value(rng, 1)).collect())
                    .collect();
                Subspace::from_vectors(&k, n, &vs)
            };
            let u = mk(du, &mut rng);
            let v = mk(dv, &mut rng);
            let s = u.sum(&k, &v).unwrap();
            let i = u.intersect(&k, &v).unwrap();
            assert_eq!(u.dim() + v.dim(), s.dim() + i.dim());
            assert!(s.contains(&k, &u) && s.contains(&k, &v));
            assert!(u.contains(&k, &i) && v.contains(&k, &i));
        }
    }

    #[test]
    fn solve_and_inconsistency() {
        let k = f3x();
        let x = k.var(0);
        let a = Mat::from_rows(
            &k,
            vec![vec![k.one(), x.clone()], vec![k.zero(), k.one()]],
        );
        let b = vec![k.add(&x, &k.one()), k.one()];
        let sol = solve(&k, &a, &b).unwrap();
        assert_eq!(a.apply(&k, &sol), b);
        // inconsistent: rows equal, rhs different
        let a2 = Mat::from_rows(&k, vec![vec![k.one(), x.clone()], vec![k.one(), x.clone()]]);
        let b2 = vec![k.one(), k.zero()];
        assert!(solve(&k, &a2, &b2).is_none());
    }

    #[test]
    fn closure_of_elementary_matrices() {
        // E12 and E21 generate the full 2x2 matrix algebra
        let k = f3x();
        let mut e12 = Mat::zero(&k, 2, 2);
        *e12.at_mut(0, 1) = k.one();
        let mut e21 = Mat::zero(&k, 2, 2);
        *e21.at_mut(1, 0) = k.one();
        let a = algebra_closure(&k, 2, &[e12, e21]);
        assert_eq!(a.dim(), 4);
        // identity alone closes to itself
        let b = algebra_closure(&k, 2, &[Mat::identity(&k, 2)]);
        assert_eq!(b.dim(), 1);
        assert!(is_product_closed(&k, 2, &a));
        assert!(is_product_closed(&k, 2, &b));
    }

    #[test]
    fn centralizer_basics() {
        let k = f3x();
        // centralizer of the identity is everything
        let c = centralizer(&k, 2, &[Mat::identity(&k, 2)], None);
        assert_eq!(c.dim(), 4);
        // centralizer of the full algebra is the scalars
        let full_mats: Vec<Mat<BaseField>> = Subspace::full(&k, 4)
            .basis()
            .iter()
            .map(|v| Mat::from_flat(&k, 2, v))
            .collect();
        let z = centralizer(&k, 2, &full_mats, None);
        assert_eq!(z.dim(), 1);
        assert!(z.contains_vec(&k, &Mat::identity(&k, 2).flatten()));
        // center of M_2(K) is K * identity
        let zc = center(&k, 2, &Subspace::full(&k, 4)).unwrap();
        assert_eq!(zc.dim(), 1);
    }

    #[test]
    fn triple_centralizer_idempotent() {
        let k = f3x();
        let x = k.var(0);
        let mut s = Mat::zero(&k, 2, 2);
        *s.at_mut(0, 1) = x.clone();
        *s.at_mut(1, 0) = k.one();
        let c1 = centralizer(&k, 2, &[s.clone()], None);
        let c1_mats: Vec<Mat<BaseField>> =
            c1.basis().iter().map(|v| Mat::from_flat(&k, 2, v)).collect();
        let c2 = centralizer(&k, 2, &c1_mats, None);
        let c2_mats: Vec<Mat<BaseField>> =
            c2.basis().iter().map(|v| Mat::from_flat(&k, 2, v)).collect();
        let c3 = centralizer(&k, 2, &c2_mats, None);
        assert_eq!(c1, c3);
    }

    #[test]
    fn canonical_rref_equality() {
        // the same subspace from different spanning sets has identical basis
        let k = f3x();
        let x = k.var(0);
        let v1 = vec![k.one(), x.clone(), k.zero()];
        let v2 = vec![k.zero(), k.one(), x.clone()];
        let sum = |a: &[FieldValueAlias], b: &[FieldValueAlias]| -> Vec<FieldValueAlias> {
            a.iter().zip(b).map(|(p, q)| k.add(p, q)).collect()
        };
        let s1 = Subspace::from_vectors(&k, 3, &[v1.clone(), v2.clone()]);
        let s2 = Subspace::from_vectors(&k, 3, &[sum(&v1, &v2), v2.clone()]);
        assert_eq!(s1, s2);
        assert_eq!(s1.basis(), s2.basis());
    }

    type FieldValueAlias = crate::exactfield::FieldValue;
}
