//! Arithmetic expression trees over named field elements.
//!
//! Tower files and subfield specifications reference generators by name;
//! expressions are evaluated against an environment mapping names to
//! elements of the field under construction.

use crate::error::{Error, Result};
use crate::ring::Field;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Name(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Int(n)
    }

    pub fn name(s: impl Into<String>) -> Self {
        Expr::Name(s.into())
    }

    pub fn eval<F: Field>(&self, field: &F, env: &BTreeMap<String, F::Elem>) -> Result<F::Elem> {
        match self {
            Expr::Int(n) => Ok(field.from_int(*n)),
            Expr::Name(s) => env
                .get(s)
                .cloned()
                .ok_or_else(|| Error::UnknownName(s.clone())),
            Expr::Add(a, b) => Ok(field.add(&a.eval(field, env)?, &b.eval(field, env)?)),
            Expr::Sub(a, b) => Ok(field.sub(&a.eval(field, env)?, &b.eval(field, env)?)),
            Expr::Mul(a, b) => Ok(field.mul(&a.eval(field, env)?, &b.eval(field, env)?)),
            Expr::Div(a, b) => field.div(&a.eval(field, env)?, &b.eval(field, env)?),
            Expr::Pow(a, e) => Ok(field.pow(&a.eval(field, env)?, *e as u64)),
            Expr::Neg(a) => Ok(field.neg(&a.eval(field, env)?)),
        }
    }

    pub fn names(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Name(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.names(out);
                b.names(out);
            }
            Expr::Pow(a, _) | Expr::Neg(a) => a.names(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(_) | Expr::Name(_) => 5,
        }
    }

    fn fmt_child(&self, child: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() <= self.precedence() && child.precedence() < 5 {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Name(s) => write!(f, "{s}"),
            Expr::Add(a, b) => {
                self.fmt_child(a, f)?;
                write!(f, "+")?;
                self.fmt_child(b, f)
            }
            Expr::Sub(a, b) => {
                self.fmt_child(a, f)?;
                write!(f, "-")?;
                self.fmt_child(b, f)
            }
            Expr::Mul(a, b) => {
                self.fmt_child(a, f)?;
                write!(f, "*")?;
                self.fmt_child(b, f)
            }
            Expr::Div(a, b) => {
                self.fmt_child(a, f)?;
                write!(f, "/")?;
                self.fmt_child(b, f)
            }
            Expr::Pow(a, e) => {
                self.fmt_child(a, f)?;
                write!(f, "^{e}")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(a, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{BaseField, BaseFieldDesc, FiniteFieldDesc, Limits};

    #[test]
    fn eval_and_unknown_name() {
        let k = BaseField::new(
            &BaseFieldDesc {
                ff: FiniteFieldDesc::prime(3),
                variables: vec!["x".into()],
            },
            Limits::default(),
        )
        .unwrap();
        let mut env = BTreeMap::new();
        env.insert("x".to_string(), k.var(0));
        let e = Expr::Add(
            Box::new(Expr::Pow(Box::new(Expr::name("x")), 2)),
            Box::new(Expr::int(1)),
        );
        let v = e.eval(&k, &env).unwrap();
        let x = k.var(0);
        assert_eq!(v, k.add(&k.mul(&x, &x), &k.one()));
        let bad = Expr::name("q");
        assert_eq!(bad.eval(&k, &env), Err(Error::UnknownName("q".into())));
    }
}
