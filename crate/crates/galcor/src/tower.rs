//! Binomial extension towers L = K(g_1, ..., g_r) with g_i^{m_i} = c_i.
//!
//! A tower carries the monomial basis g_1^{a_1}...g_r^{a_r} (0 <= a_i < m_i),
//! the full multiplication table in coordinates over K, and the machinery
//! built on it: element arithmetic, minimal polynomials, generated subfields,
//! Frobenius and p-power roots, and the purely inseparable part.

use crate::error::{Error, Result};
use crate::exactfield::{BaseField, BaseFieldDesc, FieldValue, Limits};
use crate::expr::Expr;
use crate::exactla::{kernel, rank, solve, Mat, Rref, Subspace};
use crate::ring::Field;
use crate::unipoly::UniPoly;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub power: u64,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub base: BaseFieldDesc,
    pub generators: Vec<GeneratorSpec>,
}

impl TowerSpec {
    /// Canonical text rendering; the content hash of a tower is the hash of
    /// this string.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p {}\n", self.base.ff.p));
        if let Some(m) = &self.base.ff.modulus {
            let coeffs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("modulus {}\n", coeffs.join(" ")));
        }
        if !self.base.variables.is_empty() {
            out.push_str(&format!("vars {}\n", self.base.variables.join(" ")));
        }
        for g in &self.generators {
            out.push_str(&format!("gen {} {} {}\n", g.name, g.power, g.value));
        }
        out
    }
}

/// An element of L as a coordinate vector over K in the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerElem {
    pub coords: Vec<FieldValue>,
}

/// A K-subspace of L that contains 1 and is closed under products.
#[derive(Clone, Debug, PartialEq)]
pub struct SubfieldHandle {
    space: Subspace<BaseField>,
    gens: Vec<TowerElem>,
}

impl SubfieldHandle {
    pub fn degree(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace<BaseField> {
        &self.space
    }

    pub fn gens(&self) -> &[TowerElem] {
        &self.gens
    }

    pub fn basis_elems(&self) -> Vec<TowerElem> {
        self.space
            .basis()
            .iter()
            .map(|v| TowerElem { coords: v.clone() })
            .collect()
    }

    pub fn contains(&self, field: &BaseField, e: &TowerElem) -> bool {
        self.space.contains_vec(field, &e.coords)
    }

    pub fn contains_subfield(&self, field: &BaseField, other: &SubfieldHandle) -> bool {
        self.space.contains(field, &other.space)
    }
}

/// The constructed extension L/K.
#[derive(Clone, Debug)]
pub struct FieldTower {
    base: BaseField,
    spec: TowerSpec,
    n: usize,
    gen_degrees: Vec<usize>,
    /// exponent vector of each basis monomial
    basis_exponents: Vec<Vec<u32>>,
    /// mul_table[i * n + j] = coordinates of e_i * e_j
    mul_table: Arc<Vec<Vec<FieldValue>>>,
    /// the defining values c_i, in full-tower coordinates
    gen_values: Vec<TowerElem>,
    /// whether any binomial irreducibility check was inconclusive
    unverified_irreducible: bool,
}

enum RootSearch {
    Found(TowerElem),
    NoneCertified,
    Inconclusive,
}

impl FieldTower {
    /// Builds the tower generator by generator, checking each binomial
    /// t^m - c for irreducibility before adjoining it.
    pub fn build(spec: &TowerSpec, limits: Limits) -> Result<FieldTower> {
        Self::build_inner(spec, limits, None)
    }

    /// Builds with a previously computed multiplication table (validated by
    /// spot checks); irreducibility checks are skipped, the supplied
    /// `unverified` flag is trusted.
    pub fn build_with_table(
        spec: &TowerSpec,
        limits: Limits,
        table: Vec<Vec<FieldValue>>,
        unverified: bool,
    ) -> Result<FieldTower> {
        let mut t = Self::build_inner(spec, limits, Some(table))?;
        t.unverified_irreducible = unverified;
        Ok(t)
    }

    fn build_inner(
        spec: &TowerSpec,
        limits: Limits,
        table: Option<Vec<Vec<FieldValue>>>,
    ) -> Result<FieldTower> {
        let base = BaseField::new(&spec.base, limits)?;
        let skip_checks = table.is_some();
        let mut names: Vec<String> = spec.base.variables.clone();
        if base.ff().d() > 1 {
            names.push("a".to_string());
        }
        for g in &spec.generators {
            if g.power < 2 {
                return Err(Error::BadTowerSpec(format!(
                    "generator `{}`: power must be >= 2",
                    g.name
                )));
            }
            if names.contains(&g.name) {
                return Err(Error::BadTowerSpec(format!(
                    "generator name `{}` collides with an earlier name",
                    g.name
                )));
            }
            names.push(g.name.clone());
        }

        let mut tower = FieldTower {
            base: base.clone(),
            spec: TowerSpec {
                base: spec.base.clone(),
                generators: vec![],
            },
            n: 1,
            gen_degrees: vec![],
            basis_exponents: vec![vec![]],
            mul_table: Arc::new(vec![vec![base.one()]]),
            gen_values: vec![],
            unverified_irreducible: false,
        };

        for (idx, g) in spec.generators.iter().enumerate() {
            let env = tower.name_env();
            let c = g.value.eval(&tower, &env)?;
            if tower.is_zero(&c) {
                return Err(Error::BadTowerSpec(format!(
                    "generator `{}`: defining value is zero",
                    g.name
                )));
            }
            let new_n = tower.n * g.power as usize;
            if new_n > tower.base.limits().tower_degree_cap {
                return Err(Error::TowerDegreeOverflow {
                    degree: new_n,
                    cap: tower.base.limits().tower_degree_cap,
                });
            }
            if !skip_checks {
                let certified = tower.check_binomial_irreducible(&g.name, g.power, &c)?;
                if !certified {
                    tower.unverified_irreducible = true;
                }
            }
            tower = tower.adjoin(g.clone(), c)?;
            let _ = idx;
        }

        if let Some(table) = table {
            let n = tower.n;
            if table.len() != n * n || table.iter().any(|v| v.len() != n) {
                return Err(Error::Internal("supplied multiplication table has wrong shape".into()));
            }
            tower.mul_table = Arc::new(table);
        }
        tower.validate_table()?;
        Ok(tower)
    }

    /// Environment mapping base variables, the finite field generator and
    /// the tower generators adjoined so far to elements of the tower.
    pub fn name_env(&self) -> BTreeMap<String, TowerElem> {
        let mut env = BTreeMap::new();
        for (i, v) in self.base.variables().iter().enumerate() {
            env.insert(v.clone(), self.embed_base(&self.base.var(i)));
        }
        if self.base.ff().d() > 1 {
            env.insert("a".to_string(), self.embed_base(&self.base.constant(self.base.ff().generator())));
        }
        for (i, g) in self.spec.generators.iter().enumerate() {
            env.insert(g.name.clone(), self.gen_elem(i));
        }
        env
    }

    fn adjoin(&self, gspec: GeneratorSpec, c: TowerElem) -> Result<FieldTower> {
        let n_old = self.n;
        let m = gspec.power as usize;
        let n_new = n_old * m;
        let mut table: Vec<Vec<FieldValue>> = vec![vec![]; n_new * n_new];
        let zero_coords = vec![self.base.zero(); n_new];
        for b1 in 0..n_old {
            for k1 in 0..m {
                for b2 in 0..n_old {
                    for k2 in 0..m {
                        let i = b1 + n_old * k1;
                        let j = b2 + n_old * k2;
                        if !table[j * n_new + i].is_empty() {
                            table[i * n_new + j] = table[j * n_new + i].clone();
                            continue;
                        }
                        let prod_low = &self.mul_table[b1 * n_old + b2];
                        let ktot = k1 + k2;
                        let (low, koff) = if ktot < m {
                            (prod_low.clone(), ktot)
                        } else {
                            let reduced = self.mul(
                                &TowerElem {
                                    coords: prod_low.clone(),
                                },
                                &c,
                            );
                            (reduced.coords, ktot - m)
                        };
                        let mut entry = zero_coords.clone();
                        for (b, v) in low.into_iter().enumerate() {
                            entry[b + n_old * koff] = v;
                        }
                        table[i * n_new + j] = entry;
                    }
                }
            }
        }

        let mut basis_exponents = Vec::with_capacity(n_new);
        for k in 0..m {
            for b in 0..n_old {
                let mut e = self.basis_exponents[b].clone();
                e.push(k as u32);
                basis_exponents.push(e);
            }
        }
        // reorder: index = b + n_old * k, so iterate k outer / b inner, which
        // is exactly the order above
        let mut gen_degrees = self.gen_degrees.clone();
        gen_degrees.push(m);
        let mut spec = self.spec.clone();
        spec.generators.push(gspec);
        let mut gen_values: Vec<TowerElem> = self
            .gen_values
            .iter()
            .map(|v| TowerElem {
                coords: pad(&v.coords, n_new, &self.base),
            })
            .collect();
        gen_values.push(TowerElem {
            coords: pad(&c.coords, n_new, &self.base),
        });
        Ok(FieldTower {
            base: self.base.clone(),
            spec,
            n: n_new,
            gen_degrees,
            basis_exponents,
            mul_table: Arc::new(table),
            gen_values,
            unverified_irreducible: self.unverified_irreducible,
        })
    }

    /// Spot-checks the multiplication table: identity row, commutativity on
    /// every pair, associativity on all triples for n <= 8 and on 200 seeded
    /// random triples otherwise.
    fn validate_table(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            let got = &self.mul_table[j];
            let want = unit_coords(&self.base, n, j);
            if *got != want {
                return Err(Error::Internal(format!("1 * e_{j} != e_{j}")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.mul_table[i * n + j] != self.mul_table[j * n + i] {
                    return Err(Error::Internal(format!("product not commutative at ({i},{j})")));
                }
            }
        }
        let triples: Vec<(usize, usize, usize)> = if n <= 8 {
            let mut v = vec![];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        v.push((i, j, k));
                    }
                }
            }
            v
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..200)
                .map(|_| {
                    (
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                    )
                })
                .collect()
        };
        for (i, j, k) in triples {
            let left = self.mul(
                &TowerElem {
                    coords: self.mul_table[i * n + j].clone(),
                },
                &self.basis_elem(k),
            );
            let right = self.mul(
                &self.basis_elem(i),
                &TowerElem {
                    coords: self.mul_table[j * n + k].clone(),
                },
            );
            if left != right {
                return Err(Error::Internal(format!(
                    "product not associative at ({i},{j},{k})"
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn gen_degrees(&self) -> &[usize] {
        &self.gen_degrees
    }

    pub fn unverified_irreducible(&self) -> bool {
        self.unverified_irreducible
    }

    pub fn mul_table(&self) -> &[Vec<FieldValue>] {
        &self.mul_table
    }

    pub fn basis_exponents(&self) -> &[Vec<u32>] {
        &self.basis_exponents
    }

    pub fn basis_elem(&self, i: usize) -> TowerElem {
        TowerElem {
            coords: unit_coords(&self.base, self.n, i),
        }
    }

    /// The i-th tower generator as an element.
    pub fn gen_elem(&self, i: usize) -> TowerElem {
        let stride: usize = self.gen_degrees[..i].iter().product();
        self.basis_elem(stride)
    }

    pub fn gen_value(&self, i: usize) -> &TowerElem {
        &self.gen_values[i]
    }

    pub fn embed_base(&self, v: &FieldValue) -> TowerElem {
        let mut coords = vec![self.base.zero(); self.n];
        coords[0] = v.clone();
        TowerElem { coords }
    }

    pub fn as_base_value(&self, e: &TowerElem) -> Option<FieldValue> {
        if e.coords[1..].iter().all(|c| self.base.is_zero(c)) {
            Some(e.coords[0].clone())
        } else {
            None
        }
    }

    /// Matrix of multiplication by `a` in the monomial basis (column j is
    /// the image of e_j). This is the K-algebra embedding of L into
    /// End_K(L).
    pub fn mult_matrix(&self, a: &TowerElem) -> Mat<BaseField> {
        let n = self.n;
        let mut m = Mat::zero(&self.base, n, n);
        for (i, ai) in a.coords.iter().enumerate() {
            if self.base.is_zero(ai) {
                continue;
            }
            for j in 0..n {
                let entry = &self.mul_table[i * n + j];
                for (r, v) in entry.iter().enumerate() {
                    if self.base.is_zero(v) {
                        continue;
                    }
                    let t = self.base.mul(ai, v);
                    let cur = m.at(r, j).clone();
                    *m.at_mut(r, j) = self.base.add(&cur, &t);
                }
            }
        }
        m
    }

    /// a^(p^e) by iterated Frobenius.
    pub fn frobenius_power(&self, a: &TowerElem, e: u32) -> TowerElem {
        let p = self.base.p();
        let mut x = a.clone();
        for _ in 0..e {
            x = self.pow(&x, p);
        }
        x
    }

    // --- p-power roots (semilinear solves) ---

    /// Solves beta^(p^e) = d in L. Complete: `None` certifies no root exists.
    /// `Inconclusive` only when [K : K^p] exceeds the configured cap.
    pub fn pth_root_in_tower(&self, d: &TowerElem, e: u32) -> Result<Option<TowerElem>> {
        let mut x = d.clone();
        for _ in 0..e {
            match self.proot_single(&x)? {
                Some(r) => x = r,
                None => return Ok(None),
            }
        }
        Ok(Some(x))
    }

    fn frobenius_basis(&self) -> Vec<TowerElem> {
        (0..self.n)
            .map(|i| self.frobenius_power(&self.basis_elem(i), 1))
            .collect()
    }

    fn proot_single(&self, d: &TowerElem) -> Result<Option<TowerElem>> {
        let n = self.n;
        let k = &self.base;
        let basis_p = self.frobenius_basis();
        // columns e_i^p
        let mut a = Mat::zero(k, n, n);
        for (i, b) in basis_p.iter().enumerate() {
            for r in 0..n {
                *a.at_mut(r, i) = b.coords[r].clone();
            }
        }
        if rank(k, &a) == n {
            // the e_i^p are independent: solve for u_i = b_i^p, then take
            // coefficient-wise p-th roots in K
            let u = match solve(k, &a, &d.coords) {
                Some(u) => u,
                None => return Ok(None),
            };
            let mut coords = Vec::with_capacity(n);
            for ui in &u {
                match k.pth_power_root(ui, 1) {
                    Some(b) => coords.push(b),
                    None => return Ok(None),
                }
            }
            let beta = TowerElem { coords };
            debug_assert_eq!(self.frobenius_power(&beta, 1), *d);
            return Ok(Some(beta));
        }
        // dependent: decompose K over K^p and solve the enlarged K-linear
        // system in the p-th roots of the unknowns
        self.check_frobenius_cap()?;
        let (rows, rhs) = self.semilinear_system(&basis_p, Some(d));
        let m = Mat::from_rows(k, rows);
        match solve(k, &m, &rhs) {
            Some(b) => {
                let beta = TowerElem { coords: b };
                if self.frobenius_power(&beta, 1) == *d {
                    Ok(Some(beta))
                } else {
                    Err(Error::Internal("semilinear solve produced a non-root".into()))
                }
            }
            None => Ok(None),
        }
    }

    fn check_frobenius_cap(&self) -> Result<()> {
        let k_vars = self.base.variables().len();
        let cap = self.base.limits().frobenius_var_cap;
        if k_vars > cap {
            return Err(Error::Inconclusive(format!(
                "[K:K^p] = p^{k_vars} exceeds the decomposition cap p^{cap}"
            )));
        }
        Ok(())
    }

    /// Assembles the K-linear system equivalent to
    /// Σ_i b_i^p (e_i^p)_t = rhs_t for all coordinates t: one row per
    /// (t, monomial w of K over K^p). Pass `None` for a homogeneous system
    /// over residuals instead of raw coordinates.
    fn semilinear_system(
        &self,
        vectors: &[TowerElem],
        rhs: Option<&TowerElem>,
    ) -> (Vec<Vec<FieldValue>>, Vec<FieldValue>) {
        let k = &self.base;
        let n_rows_space = self.n;
        let cols = vectors.len();
        // key = (coordinate t, K/K^p monomial w)
        let mut row_index: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
        let mut rows: Vec<Vec<FieldValue>> = Vec::new();
        let mut rhs_out: Vec<FieldValue> = Vec::new();
        let mut touch = |row_index: &mut BTreeMap<(usize, Vec<u32>), usize>,
                         rows: &mut Vec<Vec<FieldValue>>,
                         rhs_out: &mut Vec<FieldValue>,
                         key: (usize, Vec<u32>)|
         -> usize {
            if let Some(&r) = row_index.get(&key) {
                return r;
            }
            let r = rows.len();
            row_index.insert(key, r);
            rows.push(vec![k.zero(); cols]);
            rhs_out.push(k.zero());
            r
        };
        for (i, vec_i) in vectors.iter().enumerate() {
            for t in 0..n_rows_space {
                let coeff = &vec_i.coords[t];
                if k.is_zero(coeff) {
                    continue;
                }
                for (w, mu) in k.frobenius_decompose(coeff) {
                    let r = touch(&mut row_index, &mut rows, &mut rhs_out, (t, w));
                    rows[r][i] = k.add(&rows[r][i], &mu);
                }
            }
        }
        if let Some(d) = rhs {
            for t in 0..n_rows_space {
                let coeff = &d.coords[t];
                if k.is_zero(coeff) {
                    continue;
                }
                for (w, nu) in k.frobenius_decompose(coeff) {
                    let r = touch(&mut row_index, &mut rows, &mut rhs_out, (t, w));
                    rhs_out[r] = k.add(&rhs_out[r], &nu);
                }
            }
        }
        (rows, rhs_out)
    }

    /// {beta in L : beta^p in V} as a K-subspace, by the K/K^p
    /// decomposition solve.
    pub fn frobenius_preimage(&self, v: &Subspace<BaseField>) -> Result<Subspace<BaseField>> {
        self.check_frobenius_cap()?;
        let k = &self.base;
        let basis_p = self.frobenius_basis();
        // residuals of e_i^p against V; beta^p in V iff the residual of
        // beta^p vanishes, and reduction is K-linear
        let residuals: Vec<TowerElem> = basis_p
            .iter()
            .map(|b| TowerElem {
                coords: v.rref().reduce(k, &b.coords),
            })
            .collect();
        let (rows, _) = self.semilinear_system(&residuals, None);
        let sol = if rows.is_empty() {
            Subspace::full(k, self.n)
        } else {
            let m = Mat::from_rows(k, rows);
            Subspace::from_vectors(k, self.n, &kernel(k, &m))
        };
        for b in sol.basis() {
            let beta = TowerElem { coords: b.clone() };
            let bp = self.frobenius_power(&beta, 1);
            if !v.contains_vec(k, &bp.coords) {
                return Err(Error::Internal("frobenius preimage verification failed".into()));
            }
        }
        Ok(sol)
    }

    // --- subfields ---

    pub fn base_subfield(&self) -> SubfieldHandle {
        let space = Subspace::from_vectors(
            &self.base,
            self.n,
            &[unit_coords(&self.base, self.n, 0)],
        );
        SubfieldHandle { space, gens: vec![] }
    }

    pub fn full_subfield(&self) -> SubfieldHandle {
        let gens = (0..self.gen_degrees.len()).map(|i| self.gen_elem(i)).collect();
        SubfieldHandle {
            space: Subspace::full(&self.base, self.n),
            gens,
        }
    }

    /// Smallest K-subalgebra containing 1 and the generators; a
    /// finite-dimensional subalgebra of a field is a subfield.
    pub fn subfield_generate(&self, gens: &[TowerElem]) -> SubfieldHandle {
        let k = &self.base;
        let mut rref = Rref::new(self.n);
        rref.insert(k, &unit_coords(k, self.n, 0));
        for g in gens {
            rref.insert(k, &g.coords);
        }
        loop {
            let before = rref.rank();
            let basis: Vec<TowerElem> = rref
                .rows
                .iter()
                .map(|r| TowerElem { coords: r.clone() })
                .collect();
            for x in &basis {
                for y in &basis {
                    let prod = self.mul(x, y);
                    rref.insert(k, &prod.coords);
                }
            }
            if rref.rank() == before {
                break;
            }
        }
        let space = Subspace::from_vectors(
            k,
            self.n,
            &rref.rows.iter().cloned().collect::<Vec<_>>(),
        );
        SubfieldHandle {
            space,
            gens: gens.to_vec(),
        }
    }

    /// Wraps a subspace known to be a subfield, verifying 1-membership and
    /// closure on basis pairs.
    pub fn subfield_from_subspace(
        &self,
        space: Subspace<BaseField>,
        gens: Vec<TowerElem>,
    ) -> Result<SubfieldHandle> {
        let k = &self.base;
        if !space.contains_vec(k, &unit_coords(k, self.n, 0)) {
            return Err(Error::NotASubfield("does not contain 1".into()));
        }
        let basis: Vec<TowerElem> = space
            .basis()
            .iter()
            .map(|r| TowerElem { coords: r.clone() })
            .collect();
        for x in &basis {
            for y in &basis {
                let prod = self.mul(x, y);
                if !space.contains_vec(k, &prod.coords) {
                    return Err(Error::NotASubfield(
                        "not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(SubfieldHandle { space, gens })
    }

    /// Monic minimal polynomial of `a` over K (`over = None`) or over a
    /// subfield M, found as the first linear dependency among the powers of
    /// `a` (relative case: unknown coefficients constrained to M).
    pub fn min_poly(&self, a: &TowerElem, over: Option<&SubfieldHandle>) -> UniPoly<FieldTower> {
        let k = &self.base;
        let n = self.n;
        let mut powers: Vec<TowerElem> = vec![self.one()];
        loop {
            let deg = powers.len();
            let next = self.mul(powers.last().unwrap(), a);
            let m_basis: Vec<TowerElem> = match over {
                None => vec![self.one()],
                Some(m) => m.basis_elems(),
            };
            // columns: m_r * a^j for j < deg
            let mut cols: Vec<Vec<FieldValue>> = Vec::new();
            for pw in &powers {
                for mb in &m_basis {
                    cols.push(self.mul(pw, mb).coords);
                }
            }
            let mut mat = Mat::zero(k, n, cols.len());
            for (j, c) in cols.iter().enumerate() {
                for r in 0..n {
                    *mat.at_mut(r, j) = c[r].clone();
                }
            }
            if let Some(sol) = solve(k, &mat, &next.coords) {
                // f = t^deg - sum_j c_j t^j with c_j = sum_r mu_{j,r} m_r
                let mut coeffs: Vec<TowerElem> = Vec::with_capacity(deg + 1);
                for j in 0..deg {
                    let mut cj = self.zero();
                    for (r, mb) in m_basis.iter().enumerate() {
                        let mu = &sol[j * m_basis.len() + r];
                        if k.is_zero(mu) {
                            continue;
                        }
                        cj = self.add(&cj, &self.scale(mb, mu));
                    }
                    coeffs.push(self.neg(&cj));
                }
                coeffs.push(self.one());
                return UniPoly::new(self, coeffs);
            }
            powers.push(next);
            assert!(powers.len() <= n + 1, "no dependency within the degree bound");
        }
    }

    /// Minimal polynomial over K with coefficients as base field values.
    pub fn min_poly_base(&self, a: &TowerElem) -> UniPoly<BaseField> {
        let f = self.min_poly(a, None);
        UniPoly::new(
            &self.base,
            f.coeffs()
                .iter()
                .map(|c| self.as_base_value(c).expect("coefficients lie in K"))
                .collect(),
        )
    }

    pub fn scale(&self, a: &TowerElem, c: &FieldValue) -> TowerElem {
        TowerElem {
            coords: a.coords.iter().map(|x| self.base.mul(x, c)).collect(),
        }
    }

    /// The subfield of elements with a p-power in K, computed as the
    /// stabilizing union of S_e = {beta : beta^(p^e) in K} via iterated
    /// Frobenius preimages.
    pub fn purely_inseparable_part(&self) -> Result<SubfieldHandle> {
        let k = &self.base;
        let base_space = Subspace::from_vectors(k, self.n, &[unit_coords(k, self.n, 0)]);
        let mut current = base_space;
        let p = k.p() as usize;
        let mut bound = 0;
        let mut m = 1usize;
        while m < self.n {
            m *= p;
            bound += 1;
        }
        for _ in 0..bound {
            let next = self.frobenius_preimage(&current)?;
            if next.dim() == current.dim() {
                current = next;
                break;
            }
            current = next;
        }
        self.subfield_from_subspace(current, vec![])
    }

    /// Walks the generators: the tower is purely inseparable over K iff
    /// every generator has a p-power landing in K. Returns the exponent
    /// (max e with g^(p^e) in K needed) when it is.
    pub fn purely_inseparable_walk(&self) -> Option<u32> {
        let p = self.base.p() as usize;
        let mut bound = 0;
        let mut m = 1usize;
        while m < self.n {
            m *= p;
            bound += 1;
        }
        let mut exponent = 0u32;
        for i in 0..self.gen_degrees.len() {
            let g = self.gen_elem(i);
            let mut e = 0u32;
            let mut x = g;
            let mut ok = false;
            while e <= bound {
                if self.as_base_value(&x).is_some() {
                    ok = true;
                    break;
                }
                x = self.frobenius_power(&x, 1);
                e += 1;
            }
            if !ok {
                return None;
            }
            exponent = exponent.max(e);
        }
        Some(exponent)
    }

    /// Compositum = subfield generated by the union of the two bases.
    pub fn compositum(&self, m1: &SubfieldHandle, m2: &SubfieldHandle) -> SubfieldHandle {
        let mut gens = m1.basis_elems();
        gens.extend(m2.basis_elems());
        let mut byname = m1.gens.clone();
        byname.extend(m2.gens.iter().cloned());
        let mut s = self.subfield_generate(&gens);
        s.gens = byname;
        s
    }

    /// true iff the multiplication map M1 (x) M2 -> M1 M2 is an isomorphism,
    /// i.e. deg(compositum) = deg(M1) * deg(M2).
    pub fn tensor_decomposition_check(&self, m1: &SubfieldHandle, m2: &SubfieldHandle) -> bool {
        let comp = self.compositum(m1, m2);
        comp.degree() == m1.degree() * m2.degree()
    }

    // --- binomial irreducibility ---

    /// t^m - c over the current tower: irreducible iff for every prime l | m
    /// c is not an l-th power, and if 4 | m then -4c is not a 4th power.
    /// Ok(true) = certified, Ok(false) = inconclusive (proceed flagged),
    /// Err(Reducible...) = certified reducible.
    fn check_binomial_irreducible(&self, gen_name: &str, m: u64, c: &TowerElem) -> Result<bool> {
        let mut certified = true;
        for l in prime_divisors(m) {
            match self.lth_power_root(c, l)? {
                RootSearch::Found(_) => {
                    return Err(Error::ReducibleBinomial {
                        generator: gen_name.to_string(),
                        prime: l,
                    })
                }
                RootSearch::NoneCertified => {}
                RootSearch::Inconclusive => certified = false,
            }
        }
        if m % 4 == 0 && self.base.p() != 2 {
            // reducible additionally when -4c is a 4th power
            let minus4c = self.scale(c, &self.base.from_int(-4));
            match self.lth_power_root(&minus4c, 2)? {
                RootSearch::Found(s) => {
                    for cand in [s.clone(), self.neg(&s)] {
                        match self.lth_power_root(&cand, 2)? {
                            RootSearch::Found(_) => {
                                return Err(Error::ReducibleBinomialFour {
                                    generator: gen_name.to_string(),
                                })
                            }
                            RootSearch::NoneCertified => {}
                            RootSearch::Inconclusive => certified = false,
                        }
                    }
                }
                RootSearch::NoneCertified => {}
                RootSearch::Inconclusive => certified = false,
            }
        }
        Ok(certified)
    }

    /// Searches for an l-th root of c in the tower (l prime). Complete over
    /// the base field, over purely inseparable towers (Frobenius descent)
    /// and for quadratic data over diagonal quadratic towers; elsewhere the
    /// monomial-candidate search is sound but may be inconclusive.
    fn lth_power_root(&self, c: &TowerElem, l: u64) -> Result<RootSearch> {
        let p = self.base.p();
        if l == p {
            return Ok(match self.pth_root_in_tower(c, 1)? {
                Some(r) => RootSearch::Found(r),
                None => RootSearch::NoneCertified,
            });
        }
        if self.n == 1 {
            let v = self.as_base_value(c).expect("trivial tower");
            return Ok(match self.base.nth_root(&v, l) {
                Some(r) => RootSearch::Found(self.embed_base(&r)),
                None => RootSearch::NoneCertified,
            });
        }
        if let Some(exponent) = self.purely_inseparable_walk() {
            // Frobenius descent: roots of c correspond to p^exponent-th
            // roots in L of the l-th roots in K of c^(p^exponent)
            let cp = self.frobenius_power(c, exponent);
            let cpv = self
                .as_base_value(&cp)
                .expect("p-power of any element lands in K on a purely inseparable tower");
            if let Some(gamma0) = self.base.nth_root(&cpv, l) {
                for zeta in self.base.roots_of_unity(l) {
                    let gamma = self.base.mul(&zeta, &gamma0);
                    if let Some(delta) = self.pth_root_in_tower(&self.embed_base(&gamma), exponent)? {
                        debug_assert_eq!(self.pow(&delta, l), *c);
                        return Ok(RootSearch::Found(delta));
                    }
                }
            }
            return Ok(RootSearch::NoneCertified);
        }
        // candidate scan over u * (basis monomial) with u in K
        for j in 0..self.n {
            let ej = self.basis_elem(j);
            let ejl = self.pow(&ej, l);
            let d = self.div(c, &ejl)?;
            if let Some(dv) = self.as_base_value(&d) {
                if let Some(r) = self.base.nth_root(&dv, l) {
                    let root = self.scale(&ej, &r);
                    debug_assert_eq!(self.pow(&root, l), *c);
                    return Ok(RootSearch::Found(root));
                }
            }
        }
        // completeness: for l = 2 over a diagonal quadratic tower in odd
        // characteristic with c in K, squares in the tower meeting K are
        // exactly the K-squares times monomials, so the scan decides
        let diagonal_quadratic = self.gen_degrees.iter().all(|&m| m == 2)
            && self
                .gen_values
                .iter()
                .all(|v| self.as_base_value(v).is_some());
        if l == 2 && p != 2 && diagonal_quadratic && self.as_base_value(c).is_some() {
            return Ok(RootSearch::NoneCertified);
        }
        Ok(RootSearch::Inconclusive)
    }

    // --- rendering ---

    pub fn monomial_name(&self, i: usize) -> String {
        let exps = &self.basis_exponents[i];
        let mut parts: Vec<String> = Vec::new();
        for (g, &e) in self.spec.generators.iter().zip(exps) {
            match e {
                0 => {}
                1 => parts.push(g.name.clone()),
                _ => parts.push(format!("{}^{e}", g.name)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn render_elem(&self, e: &TowerElem) -> String {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in e.coords.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.render_value(c);
            let mono = self.monomial_name(i);
            let term = if mono == "1" {
                cs
            } else if self.base.is_one(c) {
                mono
            } else if cs.contains('+') || cs.contains('/') {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl Field for FieldTower {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        TowerElem {
            coords: vec![self.base.zero(); self.n],
        }
    }

    fn one(&self) -> TowerElem {
        self.basis_elem(0)
    }

    fn is_zero(&self, a: &TowerElem) -> bool {
        a.coords.iter().all(|c| self.base.is_zero(c))
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        TowerElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        }
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        TowerElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.base.sub(x, y))
                .collect(),
        }
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        TowerElem {
            coords: a.coords.iter().map(|x| self.base.neg(x)).collect(),
        }
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let n = self.n;
        let k = &self.base;
        let mut out = vec![k.zero(); n];
        for (i, ai) in a.coords.iter().enumerate() {
            if k.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if k.is_zero(bj) {
                    continue;
                }
                let c = k.mul(ai, bj);
                for (r, t) in self.mul_table[i * n + j].iter().enumerate() {
                    if k.is_zero(t) {
                        continue;
                    }
                    out[r] = k.add(&out[r], &k.mul(&c, t));
                }
            }
        }
        TowerElem { coords: out }
    }

    /// Inverse by solving mult_matrix(a) x = e_0.
    fn inv(&self, a: &TowerElem) -> Result<TowerElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let m = self.mult_matrix(a);
        let e0 = unit_coords(&self.base, self.n, 0);
        match solve(&self.base, &m, &e0) {
            Some(x) => Ok(TowerElem { coords: x }),
            None => Err(Error::Internal("nonzero element with singular multiplication matrix".into())),
        }
    }

    fn characteristic(&self) -> u64 {
        self.base.p()
    }

    fn from_int(&self, n: i64) -> TowerElem {
        self.embed_base(&self.base.from_int(n))
    }

    fn pth_root(&self, a: &TowerElem, e: u32) -> Result<Option<TowerElem>> {
        self.pth_root_in_tower(a, e)
    }
}

fn pad(coords: &[FieldValue], n: usize, k: &BaseField) -> Vec<FieldValue> {
    let mut v = coords.to_vec();
    v.resize(n, k.zero());
    v
}

pub fn unit_coords(k: &BaseField, n: usize, i: usize) -> Vec<FieldValue> {
    let mut v = vec![k.zero(); n];
    v[i] = k.one();
    v
}

fn prime_divisors(mut m: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FiniteFieldDesc;

    pub fn spec(p: u64, vars: &[&str], gens: &[(&str, u64, Expr)]) -> TowerSpec {
        TowerSpec {
            base: BaseFieldDesc {
                ff: FiniteFieldDesc::prime(p),
                variables: vars.iter().map(|s| s.to_string()).collect(),
            },
            generators: gens
                .iter()
                .map(|(n, m, e)| GeneratorSpec {
                    name: n.to_string(),
                    power: *m,
                    value: e.clone(),
                })
                .collect(),
        }
    }

    pub fn prop53_tower() -> FieldTower {
        // K = F_3(x,y), L = K(u, v) with u^3 = y, v^2 = x
        let s = spec(
            3,
            &["x", "y"],
            &[("u", 3, Expr::name("y")), ("v", 2, Expr::name("x"))],
        );
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    pub fn weisfeld_tower() -> FieldTower {
        // K = F_2(a,b,c), L = K(z, w) with z^4 = c, w^2 = a z^2 + b
        let w_expr = Expr::Add(
            Box::new(Expr::Mul(
                Box::new(Expr::name("a")),
                Box::new(Expr::Pow(Box::new(Expr::name("z")), 2)),
            )),
            Box::new(Expr::name("b")),
        );
        let s = spec(
            2,
            &["a", "b", "c"],
            &[("z", 4, Expr::name("c")), ("w", 2, w_expr)],
        );
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    pub fn kummer_tower() -> FieldTower {
        let s = spec(
            3,
            &["x", "y"],
            &[("s", 2, Expr::name("x")), ("t", 2, Expr::name("y"))],
        );
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    pub fn nonnormal_tower() -> FieldTower {
        let s = spec(2, &["x"], &[("g", 3, Expr::name("x"))]);
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    pub fn simple_insep_tower() -> FieldTower {
        let s = spec(2, &["a"], &[("s", 2, Expr::name("a"))]);
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    pub fn galois_quad_tower() -> FieldTower {
        let s = spec(3, &["x"], &[("s", 2, Expr::name("x"))]);
        FieldTower::build(&s, Limits::default()).unwrap()
    }

    #[test]
    fn tower_degrees() {
        assert_eq!(prop53_tower().degree(), 6);
        assert_eq!(weisfeld_tower().degree(), 8);
        assert_eq!(kummer_tower().degree(), 4);
        // trivial tower
        let t = FieldTower::build(&spec(3, &["x"], &[]), Limits::default()).unwrap();
        assert_eq!(t.degree(), 1);
        assert!(!t.unverified_irreducible());
    }

    #[test]
    fn all_acceptance_towers_certified() {
        for t in [
            prop53_tower(),
            weisfeld_tower(),
            kummer_tower(),
            nonnormal_tower(),
            simple_insep_tower(),
            galois_quad_tower(),
        ] {
            assert!(!t.unverified_irreducible());
        }
    }

    #[test]
    fn reducible_binomial_rejected() {
        // t^2 = x^2 is reducible
        let s = spec(3, &["x"], &[("s", 2, Expr::Pow(Box::new(Expr::name("x")), 2))]);
        let err = FieldTower::build(&s, Limits::default());
        assert!(matches!(err, Err(Error::ReducibleBinomial { prime: 2, .. })));
        // second root of the same value: v^2 = x over K(s^2 = x)
        let s2 = spec(
            3,
            &["x"],
            &[("s", 2, Expr::name("x")), ("v", 2, Expr::name("x"))],
        );
        let err2 = FieldTower::build(&s2, Limits::default());
        assert!(matches!(err2, Err(Error::ReducibleBinomial { prime: 2, .. })));
    }

    #[test]
    fn defining_relations_hold() {
        let t = prop53_tower();
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        let env = t.name_env();
        let y = env["y"].clone();
        let x = env["x"].clone();
        // u * u^2 reduces to y
        assert_eq!(t.pow(&u, 3), y);
        assert_eq!(t.pow(&v, 2), x);
        // (u+v)(u-v) = u^2 - x
        let lhs = t.mul(&t.add(&u, &v), &t.sub(&u, &v));
        let rhs = t.sub(&t.pow(&u, 2), &x);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mult_matrix_is_embedding() {
        let t = prop53_tower();
        let id = Mat::identity(t.base(), 6);
        assert_eq!(t.mult_matrix(&t.one()), id);
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        let mu = t.mult_matrix(&u);
        let mv = t.mult_matrix(&v);
        let muv = t.mult_matrix(&t.mul(&u, &v));
        assert_eq!(mu.mul(t.base(), &mv), muv);
        // inverse via matrix solve round-trips
        let s = t.add(&u, &v);
        let si = t.inv(&s).unwrap();
        assert!(t.is_one(&t.mul(&s, &si)));
    }

    #[test]
    fn min_poly_examples() {
        let t = prop53_tower();
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        // min_poly(u) = t^3 - y
        let f = t.min_poly_base(&u);
        let k = t.base();
        let y = k.var(1);
        assert_eq!(
            f.coeffs().to_vec(),
            vec![k.neg(&y), k.zero(), k.zero(), k.one()]
        );
        // u*v is a primitive element: degree 6
        let uv = t.mul(&u, &v);
        let g = t.min_poly(&uv, None);
        assert_eq!(g.degree(), 6);
        // evaluation at the root is exactly zero
        assert!(t.is_zero(&g.eval(&t, &uv)));
        // relative: min_poly(v, over K(u)) = t^2 - x
        let ku = t.subfield_generate(&[u.clone()]);
        let h = t.min_poly(&v, Some(&ku));
        assert_eq!(h.degree(), 2);
        assert!(t.is_zero(&h.eval(&t, &v)));
        // weisfeld: min_poly(w over K(z)) = t^2 - (a z^2 + b)
        let w = weisfeld_tower();
        let z = w.gen_elem(0);
        let ww = w.gen_elem(1);
        let kz = w.subfield_generate(&[z.clone()]);
        let mw = w.min_poly(&ww, Some(&kz));
        assert_eq!(mw.degree(), 2);
        assert!(w.is_zero(&mw.eval(&w, &ww)));
        assert_eq!(mw.coeff(&w, 0), w.neg(w.gen_value(1)));
    }

    #[test]
    fn subfield_generate_examples() {
        let t = prop53_tower();
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        assert_eq!(t.subfield_generate(&[u.clone()]).degree(), 3);
        assert_eq!(t.subfield_generate(&[]).degree(), 1);
        // u*v generates all of L (closure oracle)
        assert_eq!(t.subfield_generate(&[t.mul(&u, &v)]).degree(), 6);
        // degree divides n
        for s in [
            t.subfield_generate(&[u.clone()]),
            t.subfield_generate(&[v]),
            t.subfield_generate(&[u]),
        ] {
            assert_eq!(t.degree() % s.degree(), 0);
        }
    }

    #[test]
    fn frobenius_and_pth_roots() {
        let t = prop53_tower();
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        let env = t.name_env();
        let (x, y) = (env["x"].clone(), env["y"].clone());
        // freshman's dream: (u+v)^3 = y + x v
        let f = t.frobenius_power(&t.add(&u, &v), 1);
        assert_eq!(f, t.add(&y, &t.mul(&x, &v)));
        // cube root of y is u
        let r = t.pth_root_in_tower(&y, 1).unwrap().unwrap();
        assert_eq!(r, u);
        // x is not a cube in L (semilinear certificate)
        assert!(t.pth_root_in_tower(&x, 1).unwrap().is_none());
        // frobenius is additive on random pairs
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let a = random_elem(&t, &mut rng);
            let b = random_elem(&t, &mut rng);
            let lhs = t.frobenius_power(&t.add(&a, &b), 1);
            let rhs = t.add(&t.frobenius_power(&a, 1), &t.frobenius_power(&b, 1));
            assert_eq!(lhs, rhs);
        }
    }

    pub fn random_elem(t: &FieldTower, rng: &mut ChaCha8Rng) -> TowerElem {
        TowerElem {
            coords: (0..t.degree())
                .map(|_| t.base().sample_poly_value(rng, 1))
                .collect(),
        }
    }

    #[test]
    fn pth_root_round_trip_weisfeld() {
        // dependent Frobenius case: K(z) basis squares are dependent
        let t = weisfeld_tower();
        let w = t.gen_elem(1);
        let z = t.gen_elem(0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = random_elem(&t, &mut rng);
            let sq = t.pow(&a, 2);
            let r = t.pth_root_in_tower(&sq, 1).unwrap().expect("squares have roots");
            assert_eq!(t.pow(&r, 2), sq);
        }
        // w^2 = a z^2 + b has the root w, found by the semilinear solve
        let sq = t.pow(&w, 2);
        let r = t.pth_root_in_tower(&sq, 1).unwrap().unwrap();
        assert_eq!(r, w);
        // z has no square root in L
        assert!(t.pth_root_in_tower(&z, 1).unwrap().is_none());
    }

    #[test]
    fn purely_inseparable_parts() {
        // Prop-5.3-style tower: L^pi = K(u), degree 3
        let t = prop53_tower();
        let lpi = t.purely_inseparable_part().unwrap();
        assert_eq!(lpi.degree(), 3);
        let ku = t.subfield_generate(&[t.gen_elem(0)]);
        assert_eq!(lpi.space(), ku.space());
        // Weisfeld: everything is purely inseparable
        let w = weisfeld_tower();
        assert_eq!(w.purely_inseparable_part().unwrap().degree(), 8);
        assert_eq!(w.purely_inseparable_walk(), Some(2));
        // separable quadratic: trivial part
        let g = galois_quad_tower();
        assert_eq!(g.purely_inseparable_part().unwrap().degree(), 1);
        assert_eq!(g.purely_inseparable_walk(), None);
    }

    #[test]
    fn compositum_and_tensor_check() {
        let t = prop53_tower();
        let m1 = t.subfield_generate(&[t.gen_elem(0)]);
        let m2 = t.subfield_generate(&[t.gen_elem(1)]);
        let comp = t.compositum(&m1, &m2);
        assert_eq!(comp.degree(), 6);
        assert!(t.tensor_decomposition_check(&m1, &m2));
        // self-compositum fails the dimension count
        assert!(!t.tensor_decomposition_check(&m1, &m1));
        // trivial factor
        let k = t.base_subfield();
        let l = t.full_subfield();
        assert!(t.tensor_decomposition_check(&k, &l));
    }

    #[test]
    fn canonical_spec_text() {
        let t = prop53_tower();
        assert_eq!(
            t.spec().canonical_text(),
            "p 3\nvars x y\ngen u 3 y\ngen v 2 x\n"
        );
    }

    #[test]
    fn render_elems() {
        let t = prop53_tower();
        let u = t.gen_elem(0);
        let v = t.gen_elem(1);
        let e = t.add(&t.mul(&u, &v), &t.from_int(2));
        assert_eq!(t.render_elem(&e), "u*v+2");
        assert_eq!(t.render_elem(&t.zero()), "0");
    }
}
