//! Field descriptors for unramified extensions K of Q_p and arithmetic in
//! the residue field kappa = F_{p^f}.
//!
//! A descriptor fixes the prime p, the unramified degree f, a monic
//! irreducible modulus for the residue field and the representative system
//! used for coefficient labels. Ramified descriptors (e > 1) exist only as
//! bookkeeping for purely ramified extensions L of K; no arithmetic is
//! performed in L.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of coefficient positions carried by a p-adic number.
pub const DEFAULT_PRECISION: i64 = 64;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepSystem {
    /// Lifts sum a_v zeta^v with a_v in {0,...,p-1}.
    Polynomial,
    /// {0} together with the powers of a root of unity of order p^f - 1.
    Teichmuller,
}

/// An element of the residue field F_{p^f}, as coordinates with respect to
/// the basis {1, zeta, ..., zeta^(f-1)} modulo the descriptor's modulus.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ResidueElement {
    coeffs: Vec<u64>,
}

impl ResidueElement {
    pub fn new(coeffs: Vec<u64>) -> Self {
        ResidueElement { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// A coefficient label drawn from the representative system.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum RepLabel {
    Poly(ResidueElement),
    /// `None` is the label 0; `Some(k)` is zeta^k with 0 <= k <= p^f - 2.
    Teich(Option<u64>),
}

impl RepLabel {
    pub fn is_zero(&self) -> bool {
        match self {
            RepLabel::Poly(r) => r.is_zero(),
            RepLabel::Teich(k) => k.is_none(),
        }
    }
}

#[derive(Debug)]
pub struct FieldDescriptor {
    p: u64,
    f: usize,
    e: usize,
    /// Monic irreducible polynomial over F_p, coefficients low-degree first,
    /// length f + 1.
    modulus: Vec<u64>,
    rep_system: RepSystem,
    /// Generator of kappa^x used for Teichmuller labels. This is the residue
    /// of the modulus root when that root generates, otherwise the
    /// lexicographically smallest generator.
    zeta: ResidueElement,
}

pub type Field = Arc<FieldDescriptor>;

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.f == other.f
            && self.e == other.e
            && self.modulus == other.modulus
            && self.rep_system == other.rep_system
    }
}
impl Eq for FieldDescriptor {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- polynomial arithmetic over F_p, coefficients low-degree first ----

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn poly_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
        out[i] = x % p;
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0) % p;
        out[i] = x % p;
    }
    poly_trim(&mut out);
    out
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

fn mod_inv_scalar(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and small.
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Returns (quotient, remainder) of a by b.
fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = poly_deg(b).expect("division by zero polynomial");
    let lead_inv = mod_inv_scalar(b[db], p);
    let mut rem: Vec<u64> = a.to_vec();
    poly_trim(&mut rem);
    let mut quot = vec![0u64; a.len()];
    while let Some(dr) = poly_deg(&rem) {
        if dr < db {
            break;
        }
        let coef = rem[dr] * lead_inv % p;
        let shift = dr - db;
        quot[shift] = coef;
        for i in 0..=db {
            let sub = coef * b[i] % p;
            rem[i + shift] = (rem[i + shift] + p - sub) % p;
        }
        poly_trim(&mut rem);
    }
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    poly_divmod(a, b, p).1
}

/// Extended Euclid: returns (g, s) with s*a = g mod m, g = gcd(a, m) monic.
fn poly_ext_gcd(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r0: Vec<u64> = m.to_vec();
    let mut r1: Vec<u64> = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1, p);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // normalize gcd to monic
    if let Some(d) = poly_deg(&r0) {
        let inv = mod_inv_scalar(r0[d], p);
        r0 = r0.iter().map(|&c| c * inv % p).collect();
        s0 = s0.iter().map(|&c| c * inv % p).collect();
        poly_trim(&mut r0);
        poly_trim(&mut s0);
    }
    (r0, s0)
}

/// Irreducibility over F_p by trial division against all monic polynomials
/// of degree at most deg/2.
fn poly_is_irreducible(poly: &[u64], p: u64) -> bool {
    let d = match poly_deg(poly) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    for div_deg in 1..=(d / 2) {
        // enumerate monic polynomials of degree div_deg
        let count = p.pow(div_deg as u32);
        for idx in 0..count {
            let mut cand = vec![0u64; div_deg + 1];
            let mut rest = idx;
            for c in cand.iter_mut().take(div_deg) {
                *c = rest % p;
                rest /= p;
            }
            cand[div_deg] = 1;
            if poly_rem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree f
/// over F_p, with coefficients compared low-degree first.
pub fn find_modulus(p: u64, f: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if f == 0 {
        return Err(Error::InvalidInput("degree f must be >= 1".into()));
    }
    let count = p
        .checked_pow(f as u32)
        .ok_or_else(|| Error::InvalidInput("p^f overflows".into()))?;
    // Candidates ordered by the tuple (c0, c1, ..., c_{f-1}) ascending.
    for idx in 0..count {
        let mut cand = vec![0u64; f + 1];
        let mut rest = idx;
        for pos in (0..f).rev() {
            cand[pos] = rest % p;
            rest /= p;
        }
        cand[f] = 1;
        if poly_is_irreducible(&cand, p) {
            return Ok(cand);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

impl FieldDescriptor {
    pub fn unramified(p: u64, f: usize, rep_system: RepSystem) -> Result<Field> {
        let modulus = find_modulus(p, f)?;
        Self::with_modulus(p, f, modulus, rep_system)
    }

    pub fn with_modulus(
        p: u64,
        f: usize,
        modulus: Vec<u64>,
        rep_system: RepSystem,
    ) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::InvalidInput("degree f must be >= 1".into()));
        }
        if modulus.len() != f + 1 || modulus[f] != 1 {
            return Err(Error::InvalidInput(
                "modulus must be monic of degree f".into(),
            ));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput(
                "modulus coefficients must lie in [0, p)".into(),
            ));
        }
        if !poly_is_irreducible(&modulus, p) {
            return Err(Error::InvalidInput("modulus is reducible over F_p".into()));
        }
        let mut fd = FieldDescriptor {
            p,
            f,
            e: 1,
            modulus,
            rep_system,
            zeta: ResidueElement::new(vec![0; f]),
        };
        fd.zeta = fd.pick_generator()?;
        Ok(Arc::new(fd))
    }

    /// A purely ramified extension L of the given unramified field, with
    /// ramification index e. Descriptor only: arithmetic is rejected.
    pub fn ramified_over(base: &Field, e: usize) -> Field {
        Arc::new(FieldDescriptor {
            p: base.p,
            f: base.f,
            e,
            modulus: base.modulus.clone(),
            rep_system: base.rep_system,
            zeta: base.zeta.clone(),
        })
    }

    fn pick_generator(&self) -> Result<ResidueElement> {
        let order = self.residue_size() - 1;
        // Try the residue of the modulus root first (for f >= 2), then all
        // elements in lexicographic coordinate order.
        if self.f >= 2 {
            let mut root = vec![0u64; self.f];
            root[1] = 1;
            let root = ResidueElement::new(root);
            if self.residue_order(&root) == order {
                return Ok(root);
            }
        }
        for idx in 1..self.residue_size() {
            let cand = self.residue_from_index(idx);
            if self.residue_order(&cand) == order {
                return Ok(cand);
            }
        }
        Err(Error::InvalidInput(
            "no generator of the residue field found (modulus not irreducible?)".into(),
        ))
    }

    fn residue_from_index(&self, idx: u64) -> ResidueElement {
        // index digits give coordinates, c0 most significant so that the
        // enumeration is lexicographic on (c0, ..., c_{f-1}).
        let mut coeffs = vec![0u64; self.f];
        let mut rest = idx;
        for pos in (0..self.f).rev() {
            coeffs[pos] = rest % self.p;
            rest /= self.p;
        }
        ResidueElement::new(coeffs)
    }

    fn residue_order(&self, a: &ResidueElement) -> u64 {
        if a.is_zero() {
            return 0;
        }
        let mut acc = a.clone();
        let mut k = 1u64;
        let one = self.one_residue();
        while acc != one {
            acc = self.residue_mul(&acc, a);
            k += 1;
        }
        k
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn rep_system(&self) -> RepSystem {
        self.rep_system
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn zeta(&self) -> &ResidueElement {
        &self.zeta
    }

    /// p^f, the size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn zero_residue(&self) -> ResidueElement {
        ResidueElement::new(vec![0; self.f])
    }

    pub fn one_residue(&self) -> ResidueElement {
        let mut c = vec![0u64; self.f];
        c[0] = 1;
        ResidueElement::new(c)
    }

    fn check_residue(&self, a: &ResidueElement) -> Result<()> {
        if a.coeffs.len() != self.f || a.coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidInput(
                "residue element does not match the descriptor".into(),
            ));
        }
        Ok(())
    }

    pub fn residue_add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let mut sum = poly_add(&a.coeffs, &b.coeffs, self.p);
        sum.resize(self.f, 0);
        ResidueElement::new(sum)
    }

    pub fn residue_sub(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let mut diff = poly_sub(&a.coeffs, &b.coeffs, self.p);
        diff.resize(self.f, 0);
        ResidueElement::new(diff)
    }

    pub fn residue_mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let prod = poly_mul(&a.coeffs, &b.coeffs, self.p);
        let mut red = poly_rem(&prod, &self.modulus, self.p);
        red.resize(self.f, 0);
        ResidueElement::new(red)
    }

    pub fn residue_inv(&self, a: &ResidueElement) -> Result<ResidueElement> {
        self.check_residue(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s) = poly_ext_gcd(&a.coeffs, &self.modulus, self.p);
        debug_assert_eq!(poly_deg(&g), Some(0), "modulus must be irreducible");
        let mut inv = s;
        inv.resize(self.f, 0);
        Ok(ResidueElement::new(inv))
    }

    pub fn residue_pow(&self, a: &ResidueElement, mut k: u64) -> ResidueElement {
        let mut result = self.one_residue();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = self.residue_mul(&result, &base);
            }
            base = self.residue_mul(&base, &base);
            k >>= 1;
        }
        result
    }

    /// The residue class represented by a label.
    pub fn residue_of(&self, label: &RepLabel) -> ResidueElement {
        match label {
            RepLabel::Poly(r) => r.clone(),
            RepLabel::Teich(None) => self.zero_residue(),
            RepLabel::Teich(Some(k)) => self.residue_pow(&self.zeta, *k),
        }
    }

    pub fn zero_label(&self) -> RepLabel {
        match self.rep_system {
            RepSystem::Polynomial => RepLabel::Poly(self.zero_residue()),
            RepSystem::Teichmuller => RepLabel::Teich(None),
        }
    }

    pub fn one_label(&self) -> RepLabel {
        match self.rep_system {
            RepSystem::Polynomial => RepLabel::Poly(self.one_residue()),
            RepSystem::Teichmuller => RepLabel::Teich(Some(0)),
        }
    }

    pub fn label_is_valid(&self, label: &RepLabel) -> bool {
        match (self.rep_system, label) {
            (RepSystem::Polynomial, RepLabel::Poly(r)) => self.check_residue(r).is_ok(),
            (RepSystem::Teichmuller, RepLabel::Teich(None)) => true,
            (RepSystem::Teichmuller, RepLabel::Teich(Some(k))) => *k <= self.residue_size() - 2,
            _ => false,
        }
    }

    /// Canonical enumeration of the representative system: 0, 1, then the
    /// remaining labels (lexicographic coordinate order for polynomial
    /// labels, ascending powers of zeta for Teichmuller labels).
    pub fn canonical_label(&self, idx: u64) -> Result<RepLabel> {
        let size = self.residue_size();
        if idx >= size {
            return Err(Error::InvalidInput(format!(
                "label index {idx} out of range for p^f = {size}"
            )));
        }
        match self.rep_system {
            RepSystem::Teichmuller => Ok(if idx == 0 {
                RepLabel::Teich(None)
            } else {
                RepLabel::Teich(Some(idx - 1))
            }),
            RepSystem::Polynomial => {
                if idx == 0 {
                    return Ok(self.zero_label());
                }
                if idx == 1 {
                    return Ok(self.one_label());
                }
                let zero = self.zero_residue();
                let one = self.one_residue();
                let mut seen = 0u64;
                for i in 0..size {
                    let cand = self.residue_from_index(i);
                    if cand == zero || cand == one {
                        continue;
                    }
                    seen += 1;
                    if seen == idx - 1 {
                        return Ok(RepLabel::Poly(cand));
                    }
                }
                unreachable!()
            }
        }
    }

    /// The label representing a rational digit d in [0, p).
    pub fn label_from_digit(&self, d: u64) -> Result<RepLabel> {
        if d >= self.p {
            return Err(Error::InvalidInput(format!(
                "digit {d} out of range for p = {}",
                self.p
            )));
        }
        match self.rep_system {
            RepSystem::Polynomial => {
                let mut c = vec![0u64; self.f];
                c[0] = d;
                Ok(RepLabel::Poly(ResidueElement::new(c)))
            }
            RepSystem::Teichmuller => {
                if d == 0 {
                    return Ok(RepLabel::Teich(None));
                }
                let mut target = vec![0u64; self.f];
                target[0] = d;
                let target = ResidueElement::new(target);
                for k in 0..self.residue_size() - 1 {
                    if self.residue_pow(&self.zeta, k) == target {
                        return Ok(RepLabel::Teich(Some(k)));
                    }
                }
                unreachable!("every nonzero residue is a power of the generator")
            }
        }
    }
}
