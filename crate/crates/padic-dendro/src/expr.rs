//! A small symbolic expression language for 2x2 transformation matrices:
//! integers, the marks `a` and `b`, rational powers of p, sums, negation
//! and products. Expressions normalize to polynomials in (a, b, p^(d/e))
//! with integer coefficients, which makes fixed-point checks exact.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    SymA,
    SymB,
    /// p^(d/e), kept symbolic.
    PPow(Ratio<i64>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

pub fn int(n: i64) -> Expr {
    Expr::Int(n)
}

pub fn ppow(r: Ratio<i64>) -> Expr {
    Expr::PPow(r)
}

pub fn add(x: Expr, y: Expr) -> Expr {
    Expr::Add(Box::new(x), Box::new(y))
}

pub fn sub(x: Expr, y: Expr) -> Expr {
    Expr::Add(Box::new(x), Box::new(Expr::Neg(Box::new(y))))
}

pub fn mul(x: Expr, y: Expr) -> Expr {
    Expr::Mul(Box::new(x), Box::new(y))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn factor(e: &Expr) -> String {
            match e {
                Expr::Add(..) | Expr::Neg(..) => format!("({e})"),
                _ => format!("{e}"),
            }
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::SymA => write!(f, "a"),
            Expr::SymB => write!(f, "b"),
            Expr::PPow(r) => {
                if *r == Ratio::from_integer(1) {
                    write!(f, "p")
                } else if r.is_integer() {
                    write!(f, "p^{}", r.numer())
                } else {
                    write!(f, "p^({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Neg(x) => write!(f, "-{}", factor(x)),
            Expr::Add(x, y) => match y.as_ref() {
                Expr::Neg(inner) => write!(f, "{x} - {}", factor(inner)),
                _ => write!(f, "{x} + {y}"),
            },
            Expr::Mul(x, y) => write!(f, "{}*{}", factor(x), factor(y)),
        }
    }
}

/// Monomial key (deg_a, deg_b, p-exponent); the normal form maps keys to
/// integer coefficients with zero coefficients removed.
pub type Poly = BTreeMap<(u32, u32, Ratio<i64>), i64>;

pub fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Int(n) => mono(0, 0, Ratio::zero(), *n),
        Expr::SymA => mono(1, 0, Ratio::zero(), 1),
        Expr::SymB => mono(0, 1, Ratio::zero(), 1),
        Expr::PPow(r) => mono(0, 0, *r, 1),
        Expr::Neg(x) => {
            let mut p = to_poly(x);
            for c in p.values_mut() {
                *c = -*c;
            }
            p
        }
        Expr::Add(x, y) => {
            let mut p = to_poly(x);
            for (k, c) in to_poly(y) {
                *p.entry(k).or_insert(0) += c;
            }
            p.retain(|_, c| *c != 0);
            p
        }
        Expr::Mul(x, y) => {
            let (px, py) = (to_poly(x), to_poly(y));
            let mut out = Poly::new();
            for (&(a1, b1, r1), &c1) in &px {
                for (&(a2, b2, r2), &c2) in &py {
                    *out.entry((a1 + a2, b1 + b2, r1 + r2)).or_insert(0) += c1 * c2;
                }
            }
            out.retain(|_, c| *c != 0);
            out
        }
    }
}

fn mono(da: u32, db: u32, r: Ratio<i64>, c: i64) -> Poly {
    let mut p = Poly::new();
    if c != 0 {
        p.insert((da, db, r), c);
    }
    p
}

pub fn poly_eq(x: &Expr, y: &Expr) -> bool {
    to_poly(x) == to_poly(y)
}

pub type Matrix = [[Expr; 2]; 2];

/// Exact check that the Moebius map of `m` fixes `z`:
/// (m00 z + m01) = z (m10 z + m11) as polynomials.
pub fn moebius_fixes(m: &Matrix, z: &Expr) -> bool {
    let lhs = add(mul(m[0][0].clone(), z.clone()), m[0][1].clone());
    let rhs = mul(
        z.clone(),
        add(mul(m[1][0].clone(), z.clone()), m[1][1].clone()),
    );
    poly_eq(&lhs, &rhs)
}

/// The Tate generator [[-c_p, 0], [1 - c_p, -1]] with |c_p| = p^c.
pub fn theta_matrix(c: Ratio<i64>) -> Matrix {
    [
        [Expr::Neg(Box::new(ppow(c))), int(0)],
        [sub(int(1), ppow(c)), int(-1)],
    ]
}

/// The hyperbolic generator fixing a and b:
/// [[a - p^u b, (p^u - 1) a b], [1 - p^u, p^u a - b]].
pub fn sigma_matrix(u: Ratio<i64>) -> Matrix {
    [
        [
            sub(Expr::SymA, mul(ppow(u), Expr::SymB)),
            mul(sub(ppow(u), int(1)), mul(Expr::SymA, Expr::SymB)),
        ],
        [sub(int(1), ppow(u)), sub(mul(ppow(u), Expr::SymA), Expr::SymB)],
    ]
}
