//! Small finite fields F_q, q = p^d.
//!
//! Elements are packed into a single `u64` as Σ c_i p^i with the c_i the
//! coefficients of the residue polynomial in the field generator `a`.
//! Packing keeps scalar arithmetic allocation free; q is bounded by the
//! configured enumeration bound (default 2^16), so everything fits easily.

use crate::error::{Error, Result};

/// Description of a finite field: prime, extension degree, modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFieldDesc {
    pub p: u64,
    pub d: usize,
    /// Monic irreducible polynomial of degree `d` over F_p, coefficients
    /// ascending. Absent exactly when `d == 1`.
    pub modulus: Option<Vec<u64>>,
}

impl FiniteFieldDesc {
    pub fn prime(p: u64) -> Self {
        FiniteFieldDesc {
            p,
            d: 1,
            modulus: None,
        }
    }

    pub fn extension(p: u64, modulus: Vec<u64>) -> Self {
        FiniteFieldDesc {
            p,
            d: modulus.len().saturating_sub(1),
            modulus: Some(modulus),
        }
    }
}

/// A packed element of F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FFElem(pub u64);

/// A validated finite field with its arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    d: usize,
    q: u64,
    /// Ascending coefficients of the monic modulus, length d+1; `[0, 1]`
    /// placeholder when d == 1 (never used for reduction there).
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn new(desc: &FiniteFieldDesc, q_bound: u64) -> Result<Self> {
        let p = desc.p;
        if p < 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if desc.d == 0 {
            return Err(Error::BadBaseField("extension degree must be >= 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..desc.d {
            q = q.checked_mul(p).ok_or(Error::FieldTooLarge {
                q: u64::MAX,
                bound: q_bound,
            })?;
            if q > q_bound {
                return Err(Error::FieldTooLarge { q, bound: q_bound });
            }
        }
        let modulus = match (&desc.modulus, desc.d) {
            (None, 1) => vec![0, 1],
            (None, _) => {
                return Err(Error::BadBaseField(
                    "extension degree > 1 requires a modulus".into(),
                ))
            }
            (Some(m), d) => {
                if d == 1 {
                    return Err(Error::BadBaseField("degree 1 must not carry a modulus".into()));
                }
                if m.len() != d + 1 {
                    return Err(Error::BadBaseField(format!(
                        "modulus must have {} coefficients, got {}",
                        d + 1,
                        m.len()
                    )));
                }
                let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m[d] != 1 {
                    return Err(Error::BadBaseField("modulus must be monic".into()));
                }
                if !poly_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus { p, degree: d });
                }
                m
            }
        };
        Ok(FiniteField {
            p,
            d: desc.d,
            q,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn zero(&self) -> FFElem {
        FFElem(0)
    }

    pub fn one(&self) -> FFElem {
        FFElem(1)
    }

    /// The generator `a` of F_q over F_p (only meaningful for d > 1).
    pub fn generator(&self) -> FFElem {
        FFElem(self.p)
    }

    pub fn from_int(&self, n: i64) -> FFElem {
        let p = self.p as i64;
        FFElem(n.rem_euclid(p) as u64)
    }

    fn unpack(&self, a: FFElem) -> Vec<u64> {
        let mut v = vec![0u64; self.d];
        let mut x = a.0;
        for slot in v.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        v
    }

    fn pack(&self, coeffs: &[u64]) -> FFElem {
        let mut x = 0u64;
        for &c in coeffs.iter().rev() {
            x = x * self.p + (c % self.p);
        }
        FFElem(x)
    }

    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        if self.d == 1 {
            return FFElem((a.0 + b.0) % self.p);
        }
        let (va, vb) = (self.unpack(a), self.unpack(b));
        let sum: Vec<u64> = va.iter().zip(&vb).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    pub fn neg(&self, a: FFElem) -> FFElem {
        if self.d == 1 {
            return FFElem((self.p - a.0 % self.p) % self.p);
        }
        let va = self.unpack(a);
        let neg: Vec<u64> = va.iter().map(|x| (self.p - x) % self.p).collect();
        self.pack(&neg)
    }

    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        if self.d == 1 {
            return FFElem((a.0 * b.0) % self.p);
        }
        let (va, vb) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u64; 2 * self.d - 1];
        for (i, &x) in va.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in vb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // reduce modulo the monic modulus
        for k in (self.d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus.iter().enumerate().take(self.d) {
                let idx = k - self.d + i;
                prod[idx] = (prod[idx] + c * (self.p - m)) % self.p;
            }
        }
        self.pack(&prod[..self.d])
    }

    pub fn pow(&self, a: FFElem, mut e: u64) -> FFElem {
        let mut result = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        result
    }

    pub fn inv(&self, a: FFElem) -> Result<FFElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// The unique p^e-th root (F_q is perfect): iterate a -> a^(p^(d-1)).
    pub fn pth_root(&self, a: FFElem, e: u32) -> FFElem {
        if a.0 == 0 {
            return a;
        }
        let step = self.p.pow((self.d - 1) as u32);
        let mut x = a;
        for _ in 0..e {
            x = self.pow(x, step);
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.q).map(FFElem)
    }

    /// All z in F_q with z^m = 1, by exhaustive scan of F_q^*.
    pub fn roots_of_unity(&self, m: u64) -> Vec<FFElem> {
        (1..self.q)
            .map(FFElem)
            .filter(|&z| self.pow(z, m) == self.one())
            .collect()
    }

    /// All z in F_q with z^m = c, by exhaustive scan.
    pub fn all_mth_roots(&self, c: FFElem, m: u64) -> Vec<FFElem> {
        (0..self.q)
            .map(FFElem)
            .filter(|&z| self.pow(z, m) == c)
            .collect()
    }

    /// Renders an element: plain integer for d = 1, polynomial in `a` otherwise.
    pub fn render(&self, x: FFElem) -> String {
        if self.d == 1 {
            return x.0.to_string();
        }
        let coeffs = self.unpack(x);
        let mut terms: Vec<String> = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{c}*a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}*a^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

// --- dense polynomial helpers over F_p used only for modulus validation ---

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let k = r.len() - 1;
        let c = (r[k] * lead_inv) % p;
        if c != 0 {
            for i in 0..=db {
                let idx = k - db + i;
                r[idx] = (r[idx] + c * (p - b[i] % p)) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Trial division by every monic polynomial of degree <= d/2.
fn poly_irreducible(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    if d == 1 {
        return true;
    }
    for deg in 1..=(d / 2) {
        // enumerate monic polynomials c_0 + c_1 x + ... + x^deg
        let count = p.pow(deg as u32);
        for mut code in 0..count {
            let mut divisor = vec![0u64; deg + 1];
            for slot in divisor.iter_mut().take(deg) {
                *slot = code % p;
                code /= p;
            }
            divisor[deg] = 1;
            if poly_rem(m, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}
