//! Finite chain rings as explicit operation tables.
//!
//! Every ring in scope has at most [`MAX_RING_SIZE`] elements, so addition,
//! multiplication, and negation are precomputed dense tables indexed by
//! element number. Two realizations are supported for residue length > 1:
//! integers mod p^m and truncated polynomials k[u]/(u^m); they are distinct
//! rings in general but share residue data, which is all the counting
//! oracles depend on.

use super::OracleError;
use crate::numutil::prime_power;
use serde::{Deserialize, Serialize};

pub const MAX_RING_SIZE: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiniteRingSpec {
    PrimeField { p: u64 },
    PrimePowerField { p: u64, f: u32 },
    ChainRing { p: u64, f: u32, m: u32 },
}

impl FiniteRingSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        let (p, f, m) = self.shape();
        if !crate::numutil::is_prime(p) {
            return Err(OracleError::InvalidInput(format!("{p} is not prime")));
        }
        if f == 0 || m == 0 {
            return Err(OracleError::InvalidInput(
                "field degree and ring length must be positive".to_owned(),
            ));
        }
        if self.size() > u128::from(MAX_RING_SIZE) {
            return Err(OracleError::RingTooLarge {
                size: self.size(),
                cap: MAX_RING_SIZE,
            });
        }
        Ok(())
    }

    /// `(p, f, m)` with a field treated as a length-1 chain ring.
    pub fn shape(&self) -> (u64, u32, u32) {
        match *self {
            FiniteRingSpec::PrimeField { p } => (p, 1, 1),
            FiniteRingSpec::PrimePowerField { p, f } => (p, f, 1),
            FiniteRingSpec::ChainRing { p, f, m } => (p, f, m),
        }
    }

    pub fn size(&self) -> u128 {
        let (p, f, m) = self.shape();
        u128::from(p).pow(f * m)
    }

    pub fn residue_size(&self) -> u64 {
        let (p, f, _) = self.shape();
        p.pow(f)
    }

    pub fn length(&self) -> u32 {
        self.shape().2
    }

    /// Spec for the residue field `F_{q^d}` of the maximal order in a local
    /// division algebra of index `d` over a field with residue size `q`.
    pub fn residue_extension(q: u64, d: u32, length: u32) -> Result<Self, OracleError> {
        let (p, f0) = prime_power(q).ok_or(OracleError::NotPrimePower(q))?;
        Ok(FiniteRingSpec::ChainRing {
            p,
            f: f0 * d,
            m: length,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainRealization {
    /// Integers mod p^m; only available for residue degree f = 1.
    ModPm,
    /// Truncated polynomial ring F_{p^f}[u]/(u^m).
    PolyU,
}

/// Fully tabulated finite ring; all operations are O(1) lookups.
pub struct FiniteRing {
    pub spec: FiniteRingSpec,
    pub realization: ChainRealization,
    size: usize,
    one: u16,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    unit: Vec<bool>,
}

impl FiniteRing {
    pub fn build(spec: FiniteRingSpec, realization: ChainRealization) -> Result<Self, OracleError> {
        spec.validate()?;
        let (p, f, m) = spec.shape();
        match realization {
            ChainRealization::ModPm => {
                if f != 1 {
                    return Err(OracleError::InvalidInput(
                        "mod-p^m realization needs residue degree 1".to_owned(),
                    ));
                }
                Ok(Self::build_mod_pm(spec, p, m))
            }
            ChainRealization::PolyU => Ok(Self::build_poly_u(spec, p, f, m)),
        }
    }

    fn build_mod_pm(spec: FiniteRingSpec, p: u64, m: u32) -> Self {
        let s = p.pow(m) as usize;
        let mut add = vec![0u16; s * s];
        let mut mul = vec![0u16; s * s];
        let mut neg = vec![0u16; s];
        let mut unit = vec![false; s];
        for a in 0..s {
            neg[a] = ((s - a) % s) as u16;
            unit[a] = !(a as u64).is_multiple_of(p);
            for b in 0..s {
                add[a * s + b] = ((a + b) % s) as u16;
                mul[a * s + b] = ((a * b) % s) as u16;
            }
        }
        FiniteRing {
            spec,
            realization: ChainRealization::ModPm,
            size: s,
            one: 1 % s as u16,
            add,
            mul,
            neg,
            unit,
        }
    }

    fn build_poly_u(spec: FiniteRingSpec, p: u64, f: u32, m: u32) -> Self {
        let field = FieldTables::build(p, f);
        let q = field.size;
        let s = q.pow(m);
        let sm = m as usize;
        let digits = |x: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(sm);
            let mut x = x;
            for _ in 0..sm {
                v.push(x % q as usize);
                x /= q as usize;
            }
            v
        };
        let s = s as usize;
        let mut add = vec![0u16; s * s];
        let mut mul = vec![0u16; s * s];
        let mut neg = vec![0u16; s];
        let mut unit = vec![false; s];
        for a in 0..s {
            let da = digits(a);
            unit[a] = da[0] != 0;
            let mut n = 0usize;
            for (i, &c) in da.iter().enumerate() {
                n += field.neg[c] as usize * (q as usize).pow(i as u32);
            }
            neg[a] = n as u16;
            for b in 0..s {
                let db = digits(b);
                let mut sum = 0usize;
                let mut prod_digits = vec![0usize; sm];
                for i in 0..sm {
                    sum += field.add(da[i], db[i]) * (q as usize).pow(i as u32);
                    for j in 0..sm - i {
                        prod_digits[i + j] =
                            field.add(prod_digits[i + j], field.mul(da[i], db[j]));
                    }
                }
                let mut prod = 0usize;
                for (i, &c) in prod_digits.iter().enumerate() {
                    prod += c * (q as usize).pow(i as u32);
                }
                add[a * s + b] = sum as u16;
                mul[a * s + b] = prod as u16;
            }
        }
        FiniteRing {
            spec,
            realization: ChainRealization::PolyU,
            size: s,
            one: 1,
            add,
            mul,
            neg,
            unit,
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn one(&self) -> u16 {
        self.one
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn is_unit(&self, a: u16) -> bool {
        self.unit[a as usize]
    }

    pub fn count_units(&self) -> u64 {
        self.unit.iter().filter(|&&u| u).count() as u64
    }
}

/// Multiplication/addition tables for F_{p^f}, elements indexed by base-p
/// digit strings of their coefficient vectors.
struct FieldTables {
    size: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl FieldTables {
    fn build(p: u64, f: u32) -> Self {
        let q = p.pow(f) as u32;
        let g = irreducible_monic(p, f);
        let digits = |x: u32| -> Vec<u64> {
            let mut v = Vec::with_capacity(f as usize);
            let mut x = u64::from(x);
            for _ in 0..f {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let encode = |coeffs: &[u64]| -> u16 {
            let mut x = 0u64;
            for &c in coeffs.iter().rev() {
                x = x * p + c;
            }
            x as u16
        };
        let s = q as usize;
        let mut add = vec![0u16; s * s];
        let mut mul = vec![0u16; s * s];
        let mut neg = vec![0u16; s];
        for a in 0..s {
            let da = digits(a as u32);
            let dn: Vec<u64> = da.iter().map(|&c| (p - c) % p).collect();
            neg[a] = encode(&dn);
            for b in 0..s {
                let db = digits(b as u32);
                let dsum: Vec<u64> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a * s + b] = encode(&dsum);
                let mut prod = vec![0u64; 2 * f as usize - 1];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let red = poly_mod(&prod, &g, p);
                let mut coeffs = vec![0u64; f as usize];
                coeffs[..red.len()].copy_from_slice(&red);
                mul[a * s + b] = encode(&coeffs);
            }
        }
        FieldTables {
            size: q,
            add,
            mul,
            neg,
        }
    }

    #[inline]
    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size as usize + b] as usize
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size as usize + b] as usize
    }
}

/// Remainder of `a` by monic `g`, coefficients mod p, ascending order,
/// trailing zeros trimmed.
fn poly_mod(a: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &gc) in g.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * gc) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Smallest monic irreducible of degree f over F_p, found by trial
/// division; degree 1 returns x so prime fields reduce to mod-p arithmetic.
fn irreducible_monic(p: u64, f: u32) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let fu = f as usize;
    let count = p.pow(f);
    for tail in 0..count {
        let mut g = Vec::with_capacity(fu + 1);
        let mut t = tail;
        for _ in 0..fu {
            g.push(t % p);
            t /= p;
        }
        g.push(1);
        if is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p");
}

fn is_irreducible(g: &[u64], p: u64) -> bool {
    let dg = g.len() - 1;
    // trial division by every monic polynomial of degree 1..=dg/2
    for d in 1..=dg / 2 {
        let count = p.pow(d as u32);
        for tail in 0..count {
            let mut h = Vec::with_capacity(d + 1);
            let mut t = tail;
            for _ in 0..d {
                h.push(t % p);
                t /= p;
            }
            h.push(1);
            if poly_mod(g, &h, p).is_empty() {
                return false;
            }
        }
    }
    true
}
