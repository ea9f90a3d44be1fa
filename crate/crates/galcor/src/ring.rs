//! The field interface used by the generic polynomial and linear algebra code.
//!
//! Fields are context objects: elements are plain data and every operation
//! takes the field as `&self`. Both the base field `K = F_q(x_1,...,x_k)`
//! and constructed extension towers `L/K` implement [`Field`].

use crate::error::{Error, Result};

pub trait Field: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `DivisionByZero` on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn characteristic(&self) -> u64;
    fn from_int(&self, n: i64) -> Self::Elem;
    /// A `p^e`-th root of `a`, `None` if no root exists in the field.
    /// May return `Error::Inconclusive` when the solve exceeds configured caps.
    fn pth_root(&self, a: &Self::Elem, e: u32) -> Result<Option<Self::Elem>>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }

    /// `a^k` by square-and-multiply.
    fn pow(&self, a: &Self::Elem, k: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    fn sum(&self, items: impl IntoIterator<Item = Self::Elem>) -> Self::Elem {
        let mut acc = self.zero();
        for x in items {
            acc = self.add(&acc, &x);
        }
        acc
    }
}

/// Guard for nonzero divisors shared by the implementations.
pub(crate) fn nonzero_or_err<F: Field>(field: &F, a: &F::Elem) -> Result<()> {
    if field.is_zero(a) {
        Err(Error::DivisionByZero)
    } else {
        Ok(())
    }
}
