//! Univariate polynomials over any implemented field, separability analysis
//! and the separable presentation f(x) = g(x^(p^n)) with g separable.

use crate::error::{Error, Result};
use crate::ring::Field;

/// Dense univariate polynomial; coefficients ascending from degree 0,
/// trailing zeros trimmed, the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F: Field> {
    coeffs: Vec<F::Elem>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().map(|c| field.is_zero(c)).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one(field: &F) -> Self {
        UniPoly {
            coeffs: vec![field.one()],
        }
    }

    pub fn var(field: &F) -> Self {
        UniPoly {
            coeffs: vec![field.zero(), field.one()],
        }
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// `c * t^e`.
    pub fn monomial(field: &F, c: F::Elem, e: usize) -> Self {
        if field.is_zero(&c) {
            return Self::zero();
        }
        let mut coeffs = vec![field.zero(); e + 1];
        coeffs[e] = c;
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, field: &F, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(field.add(&self.coeff(field, i), &other.coeff(field, i)));
        }
        Self::new(field, out)
    }

    pub fn neg(&self, field: &F) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        Self::new(field, self.coeffs.iter().map(|x| field.mul(x, c)).collect())
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if field.is_zero(x) {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                let t = field.mul(x, y);
                out[i + j] = field.add(&out[i + j], &t);
            }
        }
        Self::new(field, out)
    }

    pub fn pow(&self, field: &F, mut e: u64) -> Self {
        let mut result = Self::one(field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        result
    }

    /// Quotient and remainder; errors on a zero divisor.
    pub fn divmod(&self, field: &F, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rem = self.clone();
        let db = divisor.degree();
        let lead_inv = field.inv(divisor.leading_coeff().unwrap())?;
        let mut quot = vec![field.zero(); rem.coeffs.len().saturating_sub(db)];
        while !rem.is_zero() && rem.degree() >= db && rem.coeffs.len() >= divisor.coeffs.len() {
            let shift = rem.degree() - db;
            let c = field.mul(rem.leading_coeff().unwrap(), &lead_inv);
            quot[shift] = field.add(&quot[shift], &c);
            for (i, bc) in divisor.coeffs.iter().enumerate() {
                let t = field.mul(&c, bc);
                rem.coeffs[shift + i] = field.sub(&rem.coeffs[shift + i], &t);
            }
            while rem.coeffs.last().map(|c| field.is_zero(c)).unwrap_or(false) {
                rem.coeffs.pop();
            }
        }
        Ok((Self::new(field, quot), rem))
    }

    pub fn monic(&self, field: &F) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(lc) if field.is_one(lc) => self.clone(),
            Some(lc) => {
                let inv = field.inv(lc).expect("nonzero leading coefficient");
                self.scale(field, &inv)
            }
        }
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, field: &F, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(field, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(field)
    }

    /// Formal derivative (characteristic-aware: coefficients i * c_i).
    pub fn derivative(&self, field: &F) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let out: Vec<F::Elem> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| field.mul(&field.from_int(i as i64), c))
            .collect();
        Self::new(field, out)
    }

    /// Substitution self(other).
    pub fn compose(&self, field: &F, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(field, other);
            acc = acc.add(field, &Self::constant(field, c.clone()));
        }
        acc
    }

    pub fn eval(&self, field: &F, x: &F::Elem) -> F::Elem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.mul(&acc, x);
            acc = field.add(&acc, c);
        }
        acc
    }

    /// Maps the coefficients into another field.
    pub fn map_coeffs<G: Field>(&self, target: &G, f: impl Fn(&F::Elem) -> G::Elem) -> UniPoly<G> {
        UniPoly::new(target, self.coeffs.iter().map(f).collect())
    }
}

/// true iff gcd(f, f') = 1; errors on constant polynomials.
pub fn is_separable_poly<F: Field>(field: &F, f: &UniPoly<F>) -> Result<bool> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let g = f.gcd(field, &f.derivative(field));
    Ok(g.is_constant() && !g.is_zero())
}

/// The presentation f(x) = f_sep(x^(p^n)) with f_sep separable.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparablePresentation<F: Field> {
    pub f_sep: UniPoly<F>,
    pub n: u32,
}

/// Peels p-th-power substitutions off `f` until the result is separable.
///
/// Intended for irreducible inputs; for reducible ones the terminal
/// polynomial can still be inseparable, which is reported as
/// `PresentationFailure` rather than silently accepted.
pub fn separable_presentation<F: Field>(field: &F, f: &UniPoly<F>) -> Result<SeparablePresentation<F>> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let p = field.characteristic();
    let mut cur = f.clone();
    let mut n = 0u32;
    while cur.derivative(field).is_zero() && !cur.is_constant() {
        let mut reduced = vec![field.zero(); cur.degree() / p as usize + 1];
        for (e, c) in cur.coeffs().iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            if e % p as usize != 0 {
                return Err(Error::NotReducible { exponent: e, p });
            }
            reduced[e / p as usize] = c.clone();
        }
        cur = UniPoly::new(field, reduced);
        n += 1;
    }
    if !is_separable_poly(field, &cur)? {
        return Err(Error::PresentationFailure);
    }
    Ok(SeparablePresentation { f_sep: cur, n })
}

/// Substitutes x -> x^(p^n) back into the separable part.
pub fn reconstruct<F: Field>(field: &F, sp: &SeparablePresentation<F>) -> UniPoly<F> {
    let p = field.characteristic();
    let step = (p as usize).pow(sp.n);
    let mut coeffs = vec![field.zero(); sp.f_sep.degree() * step + 1];
    for (e, c) in sp.f_sep.coeffs().iter().enumerate() {
        coeffs[e * step] = c.clone();
    }
    UniPoly::new(field, coeffs)
}

/// Coefficient-wise p^n-th roots of the separable part; errors with the
/// index of the first coefficient lacking a root.
pub fn descend_coefficients<F: Field>(field: &F, sp: &SeparablePresentation<F>) -> Result<UniPoly<F>> {
    if sp.n == 0 {
        return Ok(sp.f_sep.clone());
    }
    let mut out = Vec::with_capacity(sp.f_sep.coeffs().len());
    for (i, c) in sp.f_sep.coeffs().iter().enumerate() {
        match field.pth_root(c, sp.n)? {
            Some(r) => out.push(r),
            None => return Err(Error::NoRoot { index: i, e: sp.n }),
        }
    }
    Ok(UniPoly::new(field, out))
}
