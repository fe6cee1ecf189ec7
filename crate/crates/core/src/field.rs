//! Table-driven arithmetic in GF(p^k) and the quadratic tower GF(q) ⊂ GF(q²).
//!
//! Elements are stored by their integer encoding `enc(x) = Σ cᵢ pⁱ` over the
//! polynomial basis `1, t, …, t^{k−1}`. The multiplication table is built once
//! from schoolbook polynomial arithmetic modulo the defining polynomial; every
//! hot loop afterwards is a table lookup.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1024;

/// A field element, identified by its integer encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn enc(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^h` with `p` prime.
pub fn prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut rest, mut h) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        h += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, h))
}

/// Dense polynomials over GF(p), constant term first.
pub mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p * p - (lead * c) % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`p` digits of `code`.
    pub fn monic_from_code(code: u64, deg: u32, p: u32) -> Vec<u32> {
        let mut c = code;
        let mut out = Vec::with_capacity(deg as usize + 1);
        for _ in 0..deg {
            out.push((c % p as u64) as u32);
            c /= p as u64;
        }
        out.push(1);
        out
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() as u32 - 1;
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d);
            for code in 0..count {
                let f = monic_from_code(code, d, p);
                if rem_monic(m, &f, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// `GF(p)[t]/(modulus)` with the modulus stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    /// The irreducible monic polynomial of degree `k` with the smallest
    /// integer encoding of its lower coefficients.
    pub fn canonical(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidModulus("degree must be positive".into()));
        }
        let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::FieldTooLarge(order));
        }
        (0..order)
            .map(|code| poly::monic_from_code(code, k, p))
            .find(|m| poly::is_irreducible(m, p))
            .map(|modulus| FieldDescriptor { p, k, modulus })
            .ok_or_else(|| Error::InvalidModulus("no irreducible polynomial found".into()))
    }

    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be positive".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient not reduced mod p".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        let k = modulus.len() as u32 - 1;
        let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::FieldTooLarge(order));
        }
        Ok(FieldDescriptor { p, k, modulus })
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.k)
    }

    /// `"p^k/c0,c1,…,ck"`.
    pub fn spec_string(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/{}", self.p, self.k, coeffs.join(","))
    }

    /// Parses `"p^k"` or `"p^k/c0,c1,…,ck"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("field spec {s:?}; expected p^k or p^k/c0,...,ck"));
        let (head, tail) = match s.split_once('/') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let (p, k) = head.split_once('^').ok_or_else(bad)?;
        let p: u32 = p.trim().parse().map_err(|_| bad())?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        match tail {
            None => Self::canonical(p, k),
            Some(t) => {
                let modulus = t
                    .split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                let d = Self::with_modulus(p, modulus)?;
                if d.k != k {
                    return Err(Error::InvalidModulus(format!("modulus has degree {}, expected {k}", d.k)));
                }
                Ok(d)
            }
        }
    }

    pub fn coeffs(&self, x: Fe) -> Vec<u32> {
        let mut v = x.enc();
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Fe {
        let mut enc = 0u32;
        for &c in coeffs.iter().rev() {
            enc = enc * self.p + c % self.p;
        }
        Fe(enc as u16)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Inv,
    Neg,
}

/// Second operand of [`Field::arith`].
#[derive(Copy, Clone, Debug)]
pub enum Operand {
    Elem(Fe),
    Exp(u64),
    None,
}

/// GF(p^k) with full addition and multiplication tables.
#[derive(Clone, Debug)]
pub struct Field {
    desc: FieldDescriptor,
    order: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(desc: FieldDescriptor) -> Self {
        let order = desc.order();
        let p = desc.p;
        let coeffs: Vec<Vec<u32>> = (0..order).map(|e| desc.coeffs(Fe(e as u16))).collect();
        let mut add = vec![0u16; order * order];
        let mut mul = vec![0u16; order * order];
        for x in 0..order {
            for y in x..order {
                let s: Vec<u32> = coeffs[x].iter().zip(&coeffs[y]).map(|(a, b)| (a + b) % p).collect();
                let sum = desc.from_coeffs(&s).0;
                let mut px = coeffs[x].clone();
                poly::trim(&mut px);
                let mut py = coeffs[y].clone();
                poly::trim(&mut py);
                let prod = poly::rem_monic(&poly::mul(&px, &py, p), &desc.modulus, p);
                let prod = desc.from_coeffs(&prod).0;
                add[x * order + y] = sum;
                add[y * order + x] = sum;
                mul[x * order + y] = prod;
                mul[y * order + x] = prod;
            }
        }
        let mut neg = vec![0u16; order];
        let mut inv = vec![0u16; order];
        for x in 0..order {
            for y in 0..order {
                if add[x * order + y] == 0 {
                    neg[x] = y as u16;
                }
                if x != 0 && mul[x * order + y] == 1 {
                    inv[x] = y as u16;
                }
            }
        }
        Field { desc, order, add, mul, neg, inv }
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.desc.p
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order as u16).map(Fe)
    }

    /// Generator `t` of the polynomial basis (equals `p` as an encoding when k > 1).
    pub fn t(&self) -> Fe {
        if self.desc.k == 1 {
            // t ≡ −c0 in a degree-one extension.
            self.from_int(self.desc.p as i64 - self.desc.modulus[0] as i64)
        } else {
            Fe(self.desc.p as u16)
        }
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.desc.p as i64) as u16)
    }

    pub fn contains(&self, x: Fe) -> bool {
        x.idx() < self.order
    }

    #[inline]
    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        Fe(self.add[x.idx() * self.order + y.idx()])
    }

    #[inline]
    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        Fe(self.mul[x.idx() * self.order + y.idx()])
    }

    #[inline]
    pub fn neg(&self, x: Fe) -> Fe {
        Fe(self.neg[x.idx()])
    }

    pub fn inv(&self, x: Fe) -> Result<Fe> {
        if x.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fe(self.inv[x.idx()]))
        }
    }

    pub fn div(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Square-and-multiply; `pow(x, 0) = 1`.
    pub fn pow(&self, x: Fe, mut e: u64) -> Fe {
        let mut base = x;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Checked entry point: validates operand membership and nonzero divisors.
    pub fn arith(&self, op: ArithOp, x: Fe, y: Operand) -> Result<Fe> {
        let check = |v: Fe| {
            if self.contains(v) {
                Ok(v)
            } else {
                Err(Error::ForeignElement(v.enc(), self.order))
            }
        };
        let x = check(x)?;
        let elem = |y: Operand| match y {
            Operand::Elem(v) => check(v),
            _ => Err(Error::Parse(format!("{op:?} needs an element operand"))),
        };
        match op {
            ArithOp::Add => Ok(self.add(x, elem(y)?)),
            ArithOp::Sub => Ok(self.sub(x, elem(y)?)),
            ArithOp::Mul => Ok(self.mul(x, elem(y)?)),
            ArithOp::Div => self.div(x, elem(y)?),
            ArithOp::Inv => self.inv(x),
            ArithOp::Neg => Ok(self.neg(x)),
            ArithOp::Pow => match y {
                Operand::Exp(e) => Ok(self.pow(x, e)),
                _ => Err(Error::Parse("pow needs an integer exponent".into())),
            },
        }
    }

    /// Addition and multiplication tables as CSV, one block each.
    pub fn dump_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# field {}\n", self.desc.spec_string()));
        for (name, table) in [("add", &self.add), ("mul", &self.mul)] {
            out.push_str(&format!("# {name}\n"));
            for x in 0..self.order {
                let row: Vec<String> = (0..self.order).map(|y| table[x * self.order + y].to_string()).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        out
    }
}

/// GF(q²) = GF(p^{2h}) together with its subfield GF(q) and the ε-basis.
#[derive(Clone, Debug)]
pub struct FieldTower {
    big: Field,
    h: u32,
    q: u32,
    subfield: Vec<Fe>,
    in_subfield: Vec<bool>,
    frob: Vec<u16>,
    eps: Option<Fe>,
    nu: Option<Fe>,
    // (x0, x1) coordinates over {1, ε}, indexed by encoding
    coords: Vec<(Fe, Fe)>,
}

impl FieldTower {
    pub fn new(p: u32, h: u32, modulus_override: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h == 0 {
            return Err(Error::InvalidParams("subfield degree h must be positive".into()));
        }
        let desc = match modulus_override {
            Some(m) => {
                let d = FieldDescriptor::with_modulus(p, m)?;
                if d.k != 2 * h {
                    return Err(Error::InvalidModulus(format!("override has degree {}, expected {}", d.k, 2 * h)));
                }
                d
            }
            None => FieldDescriptor::canonical(p, 2 * h)?,
        };
        Ok(Self::from_field(Field::new(desc)))
    }

    /// Tower for `q = p^h` with the canonical modulus.
    pub fn for_q(q: u32) -> Result<Self> {
        let (p, h) = prime_power(q)?;
        Self::new(p, h, None)
    }

    pub fn from_descriptor(desc: FieldDescriptor) -> Result<Self> {
        if desc.k % 2 != 0 {
            return Err(Error::InvalidModulus(format!("GF({}^{}) is not a quadratic extension", desc.p, desc.k)));
        }
        Ok(Self::from_field(Field::new(desc)))
    }

    fn from_field(big: Field) -> Self {
        let p = big.characteristic();
        let h = big.descriptor().k / 2;
        let q = p.pow(h);
        let frob: Vec<u16> = big.elements().map(|x| big.pow(x, q as u64).0).collect();
        let subfield: Vec<Fe> = big.elements().filter(|x| frob[x.idx()] == x.0).collect();
        let mut in_subfield = vec![false; big.order()];
        for s in &subfield {
            in_subfield[s.idx()] = true;
        }
        let mut tower = FieldTower {
            big,
            h,
            q,
            subfield,
            in_subfield,
            frob,
            eps: None,
            nu: None,
            coords: Vec::new(),
        };
        let (eps, nu) = tower.choose_eps();
        tower.eps = eps;
        tower.nu = nu;
        if let Some(e) = eps {
            let mut coords = vec![(Fe::ZERO, Fe::ZERO); tower.big.order()];
            for &x0 in &tower.subfield {
                for &x1 in &tower.subfield {
                    let x = tower.big.add(x0, tower.big.mul(e, x1));
                    coords[x.idx()] = (x0, x1);
                }
            }
            tower.coords = coords;
        }
        tower
    }

    fn choose_eps(&self) -> (Option<Fe>, Option<Fe>) {
        let f = &self.big;
        if self.q % 2 == 1 {
            let eps = f.elements().find(|&x| !x.is_zero() && self.frobenius_q(x) == f.neg(x));
            (eps, None)
        } else {
            for x in f.elements() {
                if self.in_subfield(x) {
                    continue;
                }
                let nu = f.add(f.mul(x, x), x);
                if self.in_subfield(nu) && nu != Fe::ONE && self.absolute_trace_unchecked(nu) == Fe::ONE {
                    return (Some(x), Some(nu));
                }
            }
            (None, None)
        }
    }

    pub fn field(&self) -> &Field {
        &self.big
    }

    pub fn p(&self) -> u32 {
        self.big.characteristic()
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the big field, q².
    pub fn q2(&self) -> u32 {
        self.q * self.q
    }

    pub fn is_odd(&self) -> bool {
        self.q % 2 == 1
    }

    pub fn subfield(&self) -> &[Fe] {
        &self.subfield
    }

    #[inline]
    pub fn in_subfield(&self, x: Fe) -> bool {
        self.in_subfield[x.idx()]
    }

    pub fn eps(&self) -> Option<Fe> {
        self.eps
    }

    pub fn nu(&self) -> Option<Fe> {
        self.nu
    }

    pub fn eps_basis_available(&self) -> bool {
        self.eps.is_some()
    }

    /// x ↦ x^q.
    #[inline]
    pub fn frobenius_q(&self, x: Fe) -> Fe {
        Fe(self.frob[x.idx()])
    }

    /// x^{q+1}.
    #[inline]
    pub fn norm(&self, x: Fe) -> Fe {
        self.big.mul(x, self.frobenius_q(x))
    }

    /// x + x^q.
    #[inline]
    pub fn rtrace(&self, x: Fe) -> Fe {
        self.big.add(x, self.frobenius_q(x))
    }

    pub fn norm_and_trace(&self, x: Fe) -> (Fe, Fe) {
        (self.norm(x), self.rtrace(x))
    }

    fn absolute_trace_unchecked(&self, x: Fe) -> Fe {
        let f = &self.big;
        let p = self.p() as u64;
        let mut acc = Fe::ZERO;
        let mut term = x;
        for _ in 0..self.h {
            acc = f.add(acc, term);
            term = f.pow(term, p);
        }
        acc
    }

    /// Σ_{i<h} x^{pⁱ} for x ∈ GF(q); lands in the prime field.
    pub fn absolute_trace(&self, x: Fe) -> Result<Fe> {
        if !self.in_subfield(x) {
            return Err(Error::NotInSubfield);
        }
        Ok(self.absolute_trace_unchecked(x))
    }

    pub fn is_square_in_subfield(&self, x: Fe) -> Result<bool> {
        if !self.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        if !self.in_subfield(x) {
            return Err(Error::NotInSubfield);
        }
        Ok(x.is_zero() || self.big.pow(x, (self.q as u64 - 1) / 2) == Fe::ONE)
    }

    /// x = x⁰ + ε·x¹ with x⁰, x¹ ∈ GF(q).
    pub fn decompose(&self, x: Fe) -> Result<(Fe, Fe)> {
        if self.eps.is_none() {
            return Err(Error::EpsBasisUnavailable);
        }
        Ok(self.coords[x.idx()])
    }

    pub fn recompose(&self, x0: Fe, x1: Fe) -> Result<Fe> {
        let e = self.eps.ok_or(Error::EpsBasisUnavailable)?;
        Ok(self.big.add(x0, self.big.mul(e, x1)))
    }
}
