//! Exact arithmetic for the base field K = F_q(x_1)...(x_k).
//!
//! K is built as a tower of univariate rational function fields over a small
//! finite field: a value at depth 0 is an F_q scalar, a value at depth j >= 1
//! is a normalized fraction of dense univariate polynomials in x_j whose
//! coefficients live at depth j - 1. Canonical form: denominator monic,
//! gcd(num, den) = 1, trailing zero coefficients trimmed, zero is the empty
//! numerator. Equality is structural equality of canonical forms.

mod finite;

pub use finite::{is_prime, FFElem, FiniteField, FiniteFieldDesc};

use crate::error::{Error, Result};
use crate::ring::Field;
use std::collections::BTreeMap;

/// Configured caps guarding against expression swell and huge enumerations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum q for enumerable finite fields.
    pub q_bound: u64,
    /// Maximum degree of any univariate polynomial appearing in a value.
    pub degree_cap: usize,
    /// Maximum extension degree of a tower.
    pub tower_degree_cap: usize,
    /// Maximum number of variables admitted in K/K^p decomposition solves
    /// ([K : K^p] = p^k, capped at p^4).
    pub frobenius_var_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            q_bound: 1 << 16,
            degree_cap: 512,
            tower_degree_cap: 64,
            frobenius_var_cap: 4,
        }
    }
}

/// Description of the base field: finite constants plus transcendentals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseFieldDesc {
    pub ff: FiniteFieldDesc,
    pub variables: Vec<String>,
}

/// An element of K, recursive normalized-fraction representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldValue {
    Scalar(FFElem),
    Ratio(Box<Ratio>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    /// Dense coefficients (one depth down), ascending, trailing zeros trimmed.
    pub num: Vec<FieldValue>,
    /// Monic, coprime to `num`; `[one]` when the value is polynomial.
    pub den: Vec<FieldValue>,
}

/// The validated base field context. All `FieldValue` operations live here.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseField {
    ff: FiniteField,
    variables: Vec<String>,
    limits: Limits,
}

impl BaseField {
    pub fn new(desc: &BaseFieldDesc, limits: Limits) -> Result<Self> {
        let ff = FiniteField::new(&desc.ff, limits.q_bound)?;
        let mut seen = std::collections::BTreeSet::new();
        for v in &desc.variables {
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::BadBaseField(format!("bad variable name `{v}`")));
            }
            if v.chars().next().unwrap().is_ascii_digit() {
                return Err(Error::BadBaseField(format!("variable `{v}` starts with a digit")));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::BadBaseField(format!("duplicate variable `{v}`")));
            }
            if v == "a" && ff.d() > 1 {
                return Err(Error::BadBaseField(
                    "`a` is reserved for the finite field generator".into(),
                ));
            }
        }
        Ok(BaseField {
            ff,
            variables: desc.variables.clone(),
            limits,
        })
    }

    pub fn ff(&self) -> &FiniteField {
        &self.ff
    }

    pub fn p(&self) -> u64 {
        self.ff.p()
    }

    pub fn q(&self) -> u64 {
        self.ff.q()
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn depth(&self) -> usize {
        self.variables.len()
    }

    // --- element constructors ---

    fn zero_at(&self, depth: usize) -> FieldValue {
        if depth == 0 {
            FieldValue::Scalar(self.ff.zero())
        } else {
            FieldValue::Ratio(Box::new(Ratio {
                num: vec![],
                den: vec![self.one_at(depth - 1)],
            }))
        }
    }

    fn one_at(&self, depth: usize) -> FieldValue {
        if depth == 0 {
            FieldValue::Scalar(self.ff.one())
        } else {
            FieldValue::Ratio(Box::new(Ratio {
                num: vec![self.one_at(depth - 1)],
                den: vec![self.one_at(depth - 1)],
            }))
        }
    }

    fn embed_up(&self, v: FieldValue, from: usize, to: usize) -> FieldValue {
        if self.v_is_zero(&v) {
            return self.zero_at(to);
        }
        let mut v = v;
        for d in from..to {
            v = FieldValue::Ratio(Box::new(Ratio {
                num: vec![v],
                den: vec![self.one_at(d)],
            }));
        }
        v
    }

    /// Embeds an F_q scalar as a constant of K.
    pub fn constant(&self, c: FFElem) -> FieldValue {
        let v = FieldValue::Scalar(c);
        self.embed_up(v, 0, self.depth())
    }

    /// The variable x_{i} (0-based index into `variables`).
    pub fn var(&self, i: usize) -> FieldValue {
        assert!(i < self.depth(), "variable index out of range");
        let at = i + 1;
        let x = FieldValue::Ratio(Box::new(Ratio {
            num: vec![self.zero_at(at - 1), self.one_at(at - 1)],
            den: vec![self.one_at(at - 1)],
        }));
        self.embed_up(x, at, self.depth())
    }

    pub fn var_by_name(&self, name: &str) -> Option<FieldValue> {
        if name == "a" && self.ff.d() > 1 {
            return Some(self.constant(self.ff.generator()));
        }
        self.variables
            .iter()
            .position(|v| v == name)
            .map(|i| self.var(i))
    }

    /// Extracts the F_q scalar when the value is a constant of K.
    pub fn as_constant(&self, v: &FieldValue) -> Option<FFElem> {
        match v {
            FieldValue::Scalar(c) => Some(*c),
            FieldValue::Ratio(r) => {
                if !self.poly_is_one_shallow(&r.den) || r.num.len() > 1 {
                    return None;
                }
                if r.num.is_empty() {
                    return Some(self.ff.zero());
                }
                self.as_constant(&r.num[0])
            }
        }
    }

    fn poly_is_one_shallow(&self, p: &[FieldValue]) -> bool {
        p.len() == 1 && self.v_is_one(&p[0])
    }

    fn v_is_zero(&self, v: &FieldValue) -> bool {
        match v {
            FieldValue::Scalar(c) => c.0 == 0,
            FieldValue::Ratio(r) => r.num.is_empty(),
        }
    }

    fn v_is_one(&self, v: &FieldValue) -> bool {
        match v {
            FieldValue::Scalar(c) => c.0 == 1,
            FieldValue::Ratio(r) => {
                r.num.len() == 1 && self.v_is_one(&r.num[0]) && self.poly_is_one_shallow(&r.den)
            }
        }
    }

    // --- recursive arithmetic ---

    fn v_add(&self, depth: usize, a: &FieldValue, b: &FieldValue) -> FieldValue {
        match (a, b) {
            (FieldValue::Scalar(x), FieldValue::Scalar(y)) => FieldValue::Scalar(self.ff.add(*x, *y)),
            (FieldValue::Ratio(x), FieldValue::Ratio(y)) => {
                if self.v_is_zero(a) {
                    return b.clone();
                }
                if self.v_is_zero(b) {
                    return a.clone();
                }
                let d = depth - 1;
                if self.poly_is_one_shallow(&x.den) && self.poly_is_one_shallow(&y.den) {
                    return self.make_ratio_raw(depth, self.p_add(d, &x.num, &y.num));
                }
                let num = self.p_add(
                    d,
                    &self.p_mul(d, &x.num, &y.den),
                    &self.p_mul(d, &y.num, &x.den),
                );
                let den = self.p_mul(d, &x.den, &y.den);
                self.make_ratio(depth, num, den)
            }
            _ => panic!("mixed-depth field values"),
        }
    }

    fn v_neg(&self, depth: usize, a: &FieldValue) -> FieldValue {
        match a {
            FieldValue::Scalar(x) => FieldValue::Scalar(self.ff.neg(*x)),
            FieldValue::Ratio(r) => {
                let d = depth - 1;
                FieldValue::Ratio(Box::new(Ratio {
                    num: r.num.iter().map(|c| self.v_neg(d, c)).collect(),
                    den: r.den.clone(),
                }))
            }
        }
    }

    fn v_sub(&self, depth: usize, a: &FieldValue, b: &FieldValue) -> FieldValue {
        self.v_add(depth, a, &self.v_neg(depth, b))
    }

    fn v_mul(&self, depth: usize, a: &FieldValue, b: &FieldValue) -> FieldValue {
        match (a, b) {
            (FieldValue::Scalar(x), FieldValue::Scalar(y)) => FieldValue::Scalar(self.ff.mul(*x, *y)),
            (FieldValue::Ratio(x), FieldValue::Ratio(y)) => {
                if self.v_is_zero(a) || self.v_is_zero(b) {
                    return self.zero_at(depth);
                }
                if self.v_is_one(a) {
                    return b.clone();
                }
                if self.v_is_one(b) {
                    return a.clone();
                }
                let d = depth - 1;
                if self.poly_is_one_shallow(&x.den) && self.poly_is_one_shallow(&y.den) {
                    return self.make_ratio_raw(depth, self.p_mul(d, &x.num, &y.num));
                }
                // cross-cancel so the final fraction is already coprime
                let g1 = self.p_gcd(d, &x.num, &y.den);
                let g2 = self.p_gcd(d, &y.num, &x.den);
                let n1 = self.p_divexact(d, &x.num, &g1);
                let d2 = self.p_divexact(d, &y.den, &g1);
                let n2 = self.p_divexact(d, &y.num, &g2);
                let d1 = self.p_divexact(d, &x.den, &g2);
                let num = self.p_mul(d, &n1, &n2);
                let den = self.p_mul(d, &d1, &d2);
                self.make_ratio_coprime(depth, num, den)
            }
            _ => panic!("mixed-depth field values"),
        }
    }

    fn v_inv(&self, depth: usize, a: &FieldValue) -> Result<FieldValue> {
        if self.v_is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match a {
            FieldValue::Scalar(x) => Ok(FieldValue::Scalar(self.ff.inv(*x)?)),
            FieldValue::Ratio(r) => Ok(self.make_ratio_coprime(depth, r.den.clone(), r.num.clone())),
        }
    }

    /// Builds `num/den` assuming coprimality, normalizing the denominator to
    /// be monic.
    fn make_ratio_coprime(&self, depth: usize, num: Vec<FieldValue>, den: Vec<FieldValue>) -> FieldValue {
        let d = depth - 1;
        let mut num = num;
        let mut den = den;
        self.p_trim(&mut num);
        self.p_trim(&mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return self.zero_at(depth);
        }
        let lc = den.last().unwrap().clone();
        if !self.v_is_one(&lc) {
            let linv = self.v_inv(d, &lc).expect("nonzero leading coefficient");
            num = self.p_scale(d, &num, &linv);
            den = self.p_scale(d, &den, &linv);
        }
        FieldValue::Ratio(Box::new(Ratio { num, den }))
    }

    /// Polynomial value `num/1`.
    fn make_ratio_raw(&self, depth: usize, num: Vec<FieldValue>) -> FieldValue {
        let mut num = num;
        self.p_trim(&mut num);
        FieldValue::Ratio(Box::new(Ratio {
            num,
            den: vec![self.one_at(depth - 1)],
        }))
    }

    /// Fully normalizes `num/den` (gcd cancellation + monic denominator).
    fn make_ratio(&self, depth: usize, num: Vec<FieldValue>, den: Vec<FieldValue>) -> FieldValue {
        let d = depth - 1;
        let mut num = num;
        let mut den = den;
        self.p_trim(&mut num);
        self.p_trim(&mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return self.zero_at(depth);
        }
        if den.len() > 1 || num.len() > 1 {
            let g = self.p_gcd(d, &num, &den);
            if g.len() > 1 {
                num = self.p_divexact(d, &num, &g);
                den = self.p_divexact(d, &den, &g);
            }
        }
        self.make_ratio_coprime(depth, num, den)
    }

    // --- dense polynomial layer (coefficients one depth down) ---

    fn p_trim(&self, v: &mut Vec<FieldValue>) {
        while v.last().map(|c| self.v_is_zero(c)).unwrap_or(false) {
            v.pop();
        }
    }

    fn p_add(&self, d: usize, a: &[FieldValue], b: &[FieldValue]) -> Vec<FieldValue> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i);
            let y = b.get(i);
            out.push(match (x, y) {
                (Some(x), Some(y)) => self.v_add(d, x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        let mut out = out;
        self.p_trim(&mut out);
        out
    }

    fn p_scale(&self, d: usize, a: &[FieldValue], c: &FieldValue) -> Vec<FieldValue> {
        let mut out: Vec<FieldValue> = a.iter().map(|x| self.v_mul(d, x, c)).collect();
        self.p_trim(&mut out);
        out
    }

    fn p_mul(&self, d: usize, a: &[FieldValue], b: &[FieldValue]) -> Vec<FieldValue> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let deg = a.len() + b.len() - 2;
        assert!(
            deg <= self.limits.degree_cap,
            "polynomial degree {deg} exceeds the configured cap {}",
            self.limits.degree_cap
        );
        let mut out = vec![self.zero_at(d); deg + 1];
        for (i, x) in a.iter().enumerate() {
            if self.v_is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.v_is_zero(y) {
                    continue;
                }
                let t = self.v_mul(d, x, y);
                out[i + j] = self.v_add(d, &out[i + j], &t);
            }
        }
        self.p_trim(&mut out);
        out
    }

    /// Division with remainder; divisor must be nonzero.
    fn p_divrem(&self, d: usize, a: &[FieldValue], b: &[FieldValue]) -> (Vec<FieldValue>, Vec<FieldValue>) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        let mut rem: Vec<FieldValue> = a.to_vec();
        self.p_trim(&mut rem);
        let db = b.len() - 1;
        if rem.len() < b.len() {
            return (vec![], rem);
        }
        let lead_inv = self
            .v_inv(d, b.last().unwrap())
            .expect("nonzero leading coefficient");
        let mut quot = vec![self.zero_at(d); rem.len().saturating_sub(db)];
        while rem.len() >= b.len() && !rem.is_empty() {
            let k = rem.len() - 1;
            let c = self.v_mul(d, rem.last().unwrap(), &lead_inv);
            let shift = k - db;
            quot[shift] = self.v_add(d, &quot[shift], &c);
            for (i, bc) in b.iter().enumerate() {
                let t = self.v_mul(d, &c, bc);
                rem[shift + i] = self.v_sub(d, &rem[shift + i], &t);
            }
            self.p_trim(&mut rem);
        }
        self.p_trim(&mut quot);
        (quot, rem)
    }

    fn p_divexact(&self, d: usize, a: &[FieldValue], b: &[FieldValue]) -> Vec<FieldValue> {
        if b.len() == 1 && self.v_is_one(&b[0]) {
            return a.to_vec();
        }
        let (q, r) = self.p_divrem(d, a, b);
        debug_assert!(r.is_empty(), "inexact division");
        q
    }

    fn p_monic(&self, d: usize, a: &[FieldValue]) -> Vec<FieldValue> {
        if a.is_empty() {
            return vec![];
        }
        let lc = a.last().unwrap();
        if self.v_is_one(lc) {
            return a.to_vec();
        }
        let linv = self.v_inv(d, lc).expect("nonzero leading coefficient");
        self.p_scale(d, a, &linv)
    }

    /// Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0.
    fn p_gcd(&self, d: usize, a: &[FieldValue], b: &[FieldValue]) -> Vec<FieldValue> {
        let mut x: Vec<FieldValue> = a.to_vec();
        let mut y: Vec<FieldValue> = b.to_vec();
        self.p_trim(&mut x);
        self.p_trim(&mut y);
        while !y.is_empty() {
            let (_, r) = self.p_divrem(d, &x, &y);
            x = y;
            y = r;
        }
        self.p_monic(d, &x)
    }

    // --- p-power roots ---

    /// `b` with `b^(p^e) = a`, or `None`. Complete for K.
    pub fn pth_power_root(&self, a: &FieldValue, e: u32) -> Option<FieldValue> {
        let mut x = a.clone();
        for _ in 0..e {
            x = self.proot_single(self.depth(), &x)?;
        }
        Some(x)
    }

    fn proot_single(&self, depth: usize, a: &FieldValue) -> Option<FieldValue> {
        match a {
            FieldValue::Scalar(c) => Some(FieldValue::Scalar(self.ff.pth_root(*c, 1))),
            FieldValue::Ratio(r) => {
                let d = depth - 1;
                if r.num.is_empty() {
                    return Some(self.zero_at(depth));
                }
                let num = self.poly_proot(d, &r.num)?;
                let den = self.poly_proot(d, &r.den)?;
                Some(self.make_ratio_coprime(depth, num, den))
            }
        }
    }

    /// A polynomial is a p-th power iff every exponent with a nonzero
    /// coefficient is divisible by p and every coefficient is a p-th power.
    fn poly_proot(&self, d: usize, f: &[FieldValue]) -> Option<Vec<FieldValue>> {
        let p = self.p() as usize;
        let mut out = vec![self.zero_at(d); (f.len() + p - 1) / p];
        for (e, c) in f.iter().enumerate() {
            if self.v_is_zero(c) {
                continue;
            }
            if e % p != 0 {
                return None;
            }
            out[e / p] = self.proot_single(d, c)?;
        }
        let mut out = out;
        self.p_trim(&mut out);
        Some(out)
    }

    // --- general n-th roots (complete decision procedure for K) ---

    /// Some b with `b^n = a`, or `None` if no n-th root exists in K.
    pub fn nth_root(&self, a: &FieldValue, n: u64) -> Option<FieldValue> {
        assert!(n >= 1);
        if self.v_is_zero(a) {
            return Some(a.clone());
        }
        let p = self.p();
        let mut m = n;
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let x = if e > 0 { self.pth_power_root(a, e)? } else { a.clone() };
        if m == 1 {
            return Some(x);
        }
        self.coprime_root(self.depth(), &x, m)
    }

    fn coprime_root(&self, depth: usize, a: &FieldValue, m: u64) -> Option<FieldValue> {
        match a {
            FieldValue::Scalar(c) => self.ff.all_mth_roots(*c, m).first().copied().map(FieldValue::Scalar),
            FieldValue::Ratio(r) => {
                let d = depth - 1;
                if r.num.is_empty() {
                    return Some(self.zero_at(depth));
                }
                let den_root = self.monic_mth_root(d, &r.den, m)?;
                let lc = r.num.last().unwrap().clone();
                let lc_root = self.coprime_root(d, &lc, m)?;
                let monic_num = self.p_monic(d, &r.num);
                let num_root_monic = self.monic_mth_root(d, &monic_num, m)?;
                let num_root = self.p_scale(d, &num_root_monic, &lc_root);
                Some(self.make_ratio_coprime(depth, num_root, den_root))
            }
        }
    }

    /// Monic m-th root of a monic polynomial for p not dividing m, by
    /// top-down undetermined coefficients; complete (verifies exactly).
    fn monic_mth_root(&self, d: usize, f: &[FieldValue], m: u64) -> Option<Vec<FieldValue>> {
        if f.len() == 1 {
            return Some(vec![self.one_at(d)]);
        }
        let deg_f = f.len() - 1;
        if deg_f % (m as usize) != 0 {
            return None;
        }
        let k = deg_f / m as usize;
        let m_inv = self
            .v_inv(d, &self.int_at(d, m as i64))
            .expect("m invertible since p does not divide m");
        let mut g = vec![self.zero_at(d); k + 1];
        g[k] = self.one_at(d);
        for j in (0..k).rev() {
            let cur = self.p_pow(d, &g, m);
            let idx = (m as usize - 1) * k + j;
            let have = cur.get(idx).cloned().unwrap_or_else(|| self.zero_at(d));
            let want = f.get(idx).cloned().unwrap_or_else(|| self.zero_at(d));
            let delta = self.v_sub(d, &want, &have);
            g[j] = self.v_mul(d, &delta, &m_inv);
        }
        let check = self.p_pow(d, &g, m);
        if self.p_eq(&check, f) {
            let mut g = g;
            self.p_trim(&mut g);
            Some(g)
        } else {
            None
        }
    }

    fn p_eq(&self, a: &[FieldValue], b: &[FieldValue]) -> bool {
        a == b
    }

    fn p_pow(&self, d: usize, a: &[FieldValue], mut e: u64) -> Vec<FieldValue> {
        let mut result = vec![self.one_at(d)];
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.p_mul(d, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.p_mul(d, &base, &base);
            }
        }
        result
    }

    fn int_at(&self, d: usize, n: i64) -> FieldValue {
        self.embed_up(FieldValue::Scalar(self.ff.from_int(n)), 0, d)
    }

    /// All z in F_q with z^m = 1, embedded as constants of K.
    pub fn roots_of_unity(&self, m: u64) -> Vec<FieldValue> {
        self.ff
            .roots_of_unity(m)
            .into_iter()
            .map(|z| self.constant(z))
            .collect()
    }

    // --- K over K^p decomposition ---

    /// Writes `v = Σ_w μ_w^p · w` over the monomial basis
    /// `w = x_1^{r_1} ... x_k^{r_k}`, `0 <= r_i < p`, of K over K^p.
    /// Returns the nonzero (exponent vector, μ_w) pairs, sorted by exponent.
    pub fn frobenius_decompose(&self, v: &FieldValue) -> Vec<(Vec<u32>, FieldValue)> {
        self.frob_at(self.depth(), v)
            .into_iter()
            .filter(|(_, mu)| !self.v_is_zero(mu))
            .collect()
    }

    fn frob_at(&self, depth: usize, v: &FieldValue) -> Vec<(Vec<u32>, FieldValue)> {
        match v {
            FieldValue::Scalar(c) => vec![(vec![], FieldValue::Scalar(self.ff.pth_root(*c, 1)))],
            FieldValue::Ratio(r) => {
                let d = depth - 1;
                let p = self.p() as usize;
                if r.num.is_empty() {
                    return vec![];
                }
                // v = num/den = (num * den^(p-1)) / den^p
                let den_pow = self.p_pow(d, &r.den, self.p() - 1);
                let big = self.p_mul(d, &r.num, &den_pow);
                let mut acc: BTreeMap<Vec<u32>, Vec<FieldValue>> = BTreeMap::new();
                for (e, c) in big.iter().enumerate() {
                    if self.v_is_zero(c) {
                        continue;
                    }
                    for (mut key, mu) in self.frob_at(d, c) {
                        key.push((e % p) as u32);
                        let poly = acc.entry(key).or_default();
                        let slot = e / p;
                        if poly.len() <= slot {
                            poly.resize(slot + 1, self.zero_at(d));
                        }
                        poly[slot] = self.v_add(d, &poly[slot], &mu);
                    }
                }
                acc.into_iter()
                    .map(|(key, poly)| (key, self.make_ratio(depth, poly, r.den.clone())))
                    .collect()
            }
        }
    }

    // --- rendering ---

    /// Canonical text form; round-trips through the expression parser.
    pub fn render_value(&self, v: &FieldValue) -> String {
        self.render_at(self.depth(), v)
    }

    fn render_at(&self, depth: usize, v: &FieldValue) -> String {
        match v {
            FieldValue::Scalar(c) => self.ff.render(*c),
            FieldValue::Ratio(r) => {
                if r.num.is_empty() {
                    return "0".to_string();
                }
                let num = self.render_poly(depth, &r.num);
                if self.poly_is_one_shallow(&r.den) {
                    num
                } else {
                    let den = self.render_poly(depth, &r.den);
                    format!("({num})/({den})")
                }
            }
        }
    }

    fn render_poly(&self, depth: usize, f: &[FieldValue]) -> String {
        let var = &self.variables[depth - 1];
        let d = depth - 1;
        let mut terms: Vec<String> = Vec::new();
        for (e, c) in f.iter().enumerate().rev() {
            if self.v_is_zero(c) {
                continue;
            }
            let cs = self.render_at(d, c);
            let coeff = if cs.contains('+') || cs.contains('/') {
                format!("({cs})")
            } else {
                cs.clone()
            };
            let term = match e {
                0 => coeff,
                _ => {
                    let vpart = if e == 1 { var.clone() } else { format!("{var}^{e}") };
                    if self.v_is_one(c) {
                        vpart
                    } else {
                        format!("{coeff}*{vpart}")
                    }
                }
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// A pseudo-random value: polynomial-over-polynomial of bounded degree.
    /// Used by the seeded validation and test suites.
    pub fn sample_value(&self, rng: &mut impl rand::Rng, max_deg: usize) -> FieldValue {
        self.sample_at(self.depth(), rng, max_deg)
    }

    fn sample_at(&self, depth: usize, rng: &mut impl rand::Rng, max_deg: usize) -> FieldValue {
        if depth == 0 {
            return FieldValue::Scalar(FFElem(rng.gen_range(0..self.q())));
        }
        let d = depth - 1;
        let dn = rng.gen_range(0..=max_deg);
        let dd = rng.gen_range(0..=max_deg);
        let num: Vec<FieldValue> = (0..=dn).map(|_| self.sample_at(d, rng, max_deg)).collect();
        let mut den: Vec<FieldValue> = (0..dd).map(|_| self.sample_at(d, rng, max_deg)).collect();
        den.push(self.one_at(d));
        self.make_ratio(depth, num, den)
    }

    /// A pseudo-random polynomial value (trivial denominators at every
    /// level); sums of these stay small, unlike sums of random fractions.
    pub fn sample_poly_value(&self, rng: &mut impl rand::Rng, max_deg: usize) -> FieldValue {
        self.sample_poly_at(self.depth(), rng, max_deg)
    }

    fn sample_poly_at(&self, depth: usize, rng: &mut impl rand::Rng, max_deg: usize) -> FieldValue {
        if depth == 0 {
            return FieldValue::Scalar(FFElem(rng.gen_range(0..self.q())));
        }
        let d = depth - 1;
        let dn = rng.gen_range(0..=max_deg);
        let num: Vec<FieldValue> = (0..=dn).map(|_| self.sample_poly_at(d, rng, max_deg)).collect();
        self.make_ratio_raw(depth, num)
    }
}

impl Field for BaseField {
    type Elem = FieldValue;

    fn zero(&self) -> FieldValue {
        self.zero_at(self.depth())
    }

    fn one(&self) -> FieldValue {
        self.one_at(self.depth())
    }

    fn is_zero(&self, a: &FieldValue) -> bool {
        self.v_is_zero(a)
    }

    fn add(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        self.v_add(self.depth(), a, b)
    }

    fn sub(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        self.v_sub(self.depth(), a, b)
    }

    fn neg(&self, a: &FieldValue) -> FieldValue {
        self.v_neg(self.depth(), a)
    }

    fn mul(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        self.v_mul(self.depth(), a, b)
    }

    fn inv(&self, a: &FieldValue) -> Result<FieldValue> {
        self.v_inv(self.depth(), a)
    }

    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn from_int(&self, n: i64) -> FieldValue {
        self.constant(self.ff.from_int(n))
    }

    fn pth_root(&self, a: &FieldValue, e: u32) -> Result<Option<FieldValue>> {
        Ok(self.pth_power_root(a, e))
    }

    fn is_one(&self, a: &FieldValue) -> bool {
        self.v_is_one(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn f2xy() -> BaseField {
        BaseField::new(
            &BaseFieldDesc {
                ff: FiniteFieldDesc::prime(2),
                variables: vec!["x".into(), "y".into()],
            },
            Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_pair_cancels() {
        // (x+1)/x * x/(x+1) = 1 over F_3(x)
        let k = f3x();
        let x = k.var(0);
        let xp1 = k.add(&x, &k.one());
        let a = k.div(&xp1, &x).unwrap();
        let b = k.div(&x, &xp1).unwrap();
        assert!(k.is_one(&k.mul(&a, &b)));
    }

    #[test]
    fn normalization_cancels_common_factor() {
        // (x^2 - 1)/(x - 1) = x + 1; oracle: long division and a gcd check
        let k = f3x();
        let x = k.var(0);
        let num = k.sub(&k.mul(&x, &x), &k.one());
        let den = k.sub(&x, &k.one());
        let v = k.div(&num, &den).unwrap();
        let expected = k.add(&x, &k.one());
        assert_eq!(v, expected);
        // oracle: expected * den == num exactly and gcd(num, den) has degree 1
        assert_eq!(k.mul(&expected, &den), num);
    }

    #[test]
    fn canonical_idempotent() {
        let k = f3x();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = k.sample_value(&mut rng, 3);
            let b = k.sample_value(&mut rng, 3);
            if k.is_zero(&b) {
                continue;
            }
            // a/b followed by *b reproduces a exactly (structural equality)
            let q = k.div(&a, &b).unwrap();
            assert_eq!(k.mul(&q, &b), a);
        }
    }

    #[test]
    fn field_axioms_random_pairs() {
        for k in [f3x(), f2xy()] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..200 {
                let a = k.sample_value(&mut rng, 2);
                let b = k.sample_value(&mut rng, 2);
                let c = k.sample_value(&mut rng, 2);
                assert_eq!(k.add(&a, &b), k.add(&b, &a));
                assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
                assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
                assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
                assert_eq!(
                    k.mul(&a, &k.add(&b, &c)),
                    k.add(&k.mul(&a, &b), &k.mul(&a, &c))
                );
                if !k.is_zero(&a) {
                    assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
                }
            }
        }
    }

    #[test]
    fn pth_power_root_examples() {
        // F_2(x): x^2 -> x; x -> no root
        let k = BaseField::new(
            &BaseFieldDesc {
                ff: FiniteFieldDesc::prime(2),
                variables: vec!["x".into()],
            },
            Limits::default(),
        )
        .unwrap();
        let x = k.var(0);
        let x2 = k.mul(&x, &x);
        assert_eq!(k.pth_power_root(&x2, 1), Some(x.clone()));
        assert_eq!(k.pth_power_root(&x, 1), None);
    }

    #[test]
    fn pth_root_round_trip_random() {
        let k = f2xy();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let a = k.sample_value(&mut rng, 2);
            let sq = k.mul(&a, &a);
            let r = k.pth_power_root(&sq, 1).expect("squares have roots");
            assert_eq!(k.mul(&r, &r), sq);
            if let Some(b) = k.pth_power_root(&a, 1) {
                assert_eq!(k.mul(&b, &b), a);
            }
        }
    }

    #[test]
    fn nth_root_decides() {
        let k = f3x();
        let x = k.var(0);
        // x^2 has the square root x (up to sign); x does not
        let x2 = k.mul(&x, &x);
        let r = k.nth_root(&x2, 2).unwrap();
        assert_eq!(k.mul(&r, &r), x2);
        assert!(k.nth_root(&x, 2).is_none());
        // (x+1)^3 * x^3 has a cube root over F_3? cube = p-th power here
        let xp1 = k.add(&x, &k.one());
        let c = k.mul(&k.pow(&xp1, 3), &k.pow(&x, 3));
        let r3 = k.nth_root(&c, 3).unwrap();
        assert_eq!(k.pow(&r3, 3), c);
        // mixed: 6th root of ((x+1)x)^6
        let b = k.mul(&xp1, &x);
        let c6 = k.pow(&b, 6);
        let r6 = k.nth_root(&c6, 6).unwrap();
        assert_eq!(k.pow(&r6, 6), c6);
    }

    #[test]
    fn roots_of_unity_embedded() {
        let k = f3x();
        let roots = k.roots_of_unity(2);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| k.is_one(r)));
        assert!(roots.iter().any(|r| *r == k.from_int(-1)));
    }

    #[test]
    fn frobenius_decomposition_reconstructs() {
        let k = f2xy();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..40 {
            let v = k.sample_value(&mut rng, 2);
            let parts = k.frobenius_decompose(&v);
            // v == Σ μ_w^p * w
            let mut acc = k.zero();
            for (w, mu) in &parts {
                let mut term = k.pow(mu, k.p());
                for (i, &e) in w.iter().enumerate() {
                    for _ in 0..e {
                        term = k.mul(&term, &k.var(i));
                    }
                }
                acc = k.add(&acc, &term);
            }
            assert_eq!(acc, v);
        }
    }

    #[test]
    fn render_round_values() {
        let k = f3x();
        let x = k.var(0);
        let v = k.div(&k.add(&k.mul(&x, &x), &k.one()), &x).unwrap();
        assert_eq!(k.render_value(&v), "(x^2+1)/(x)");
        assert_eq!(k.render_value(&k.zero()), "0");
        assert_eq!(k.render_value(&k.from_int(2)), "2");
    }
}
