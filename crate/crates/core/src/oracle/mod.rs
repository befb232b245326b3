//! Brute-force ground truth for the closed-form volume and index formulas:
//! exhaustive matrix enumeration over finite fields and finite chain rings,
//! and coset counting in explicit finite abelian groups. Everything here
//! recomputes quantities the rest of the crate derives from formulas, by
//! methods sharing no code path with those formulas.

mod ring;

pub use ring::{ChainRealization, FiniteRing, FiniteRingSpec, MAX_RING_SIZE};

use crate::localgeom::{volume_max_compact_mult, LocalAlgebraSpec, QValue};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ring of size {size} exceeds the {cap}-element table cap")]
    RingTooLarge { size: u128, cap: u64 },
    #[error("enumeration of {required} matrices exceeds the {cap} work cap")]
    EnumerationTooLarge { required: u128, cap: u64 },
    #[error("group of order {order} exceeds the {cap} cap")]
    GroupTooLarge { order: u128, cap: u64 },
}

/// `|GL(n, F_q)| = prod_{i=0}^{n-1} (q^n - q^i)`, the closed form the
/// enumeration oracles are checked against.
pub fn order_gl_finite(n: u32, q: u64) -> Result<BigUint, OracleError> {
    if n == 0 {
        return Err(OracleError::InvalidInput("n must be >= 1".to_owned()));
    }
    if crate::numutil::prime_power(q).is_none() {
        return Err(OracleError::NotPrimePower(q));
    }
    let qq = BigUint::from(q);
    let qn = qq.pow(n);
    let mut order = BigUint::from(1u32);
    for i in 0..n {
        order *= &qn - qq.pow(i);
    }
    Ok(order)
}

/// Closed form for a chain ring with residue size `q` and length `m`:
/// `q^(n^2 (m-1)) * |GL(n, F_q)|`, from the reduction exact sequence whose
/// kernel is the additive group of matrices over the maximal ideal.
pub fn order_gl_chain_ring(n: u32, residue_size: u64, length: u32) -> Result<BigUint, OracleError> {
    if length == 0 {
        return Err(OracleError::InvalidInput("length must be >= 1".to_owned()));
    }
    let field_part = order_gl_finite(n, residue_size)?;
    Ok(BigUint::from(residue_size).pow(n * n * (length - 1)) * field_part)
}

/// Largest matrix-space size [`count_gl_by_enumeration`] will walk.
pub const MAX_ENUMERATION_WORK: u64 = 600_000_000;

/// Number of invertible n x n matrices over the ring, by visiting every
/// matrix and testing its determinant against the ring's unit table.
/// No closed form is consulted.
pub fn count_gl_by_enumeration(n: u32, ring: &FiniteRing) -> Result<u64, OracleError> {
    if n == 0 || n > 3 {
        return Err(OracleError::InvalidInput(format!(
            "enumeration supports 1 <= n <= 3, got {n}"
        )));
    }
    let s = ring.size();
    let required = (s as u128).pow(n * n);
    if required > u128::from(MAX_ENUMERATION_WORK) {
        return Err(OracleError::EnumerationTooLarge {
            required,
            cap: MAX_ENUMERATION_WORK,
        });
    }
    Ok(match n {
        1 => ring.count_units(),
        2 => count_gl2(ring),
        _ => count_gl3(ring),
    })
}

fn count_gl2(ring: &FiniteRing) -> u64 {
    let s = ring.size() as u16;
    let mut count = 0u64;
    for a in 0..s {
        for d in 0..s {
            let ad = ring.mul(a, d);
            for b in 0..s {
                let nb = ring.neg(b);
                for c in 0..s {
                    // det = ad - bc
                    if ring.is_unit(ring.add(ad, ring.mul(nb, c))) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn count_gl3(ring: &FiniteRing) -> u64 {
    let s = ring.size() as u16;
    let mut count = 0u64;
    // rows 2 and 3 fix the cofactor minors; row 1 is the fast inner sweep
    for d in 0..s {
        for e in 0..s {
            for f in 0..s {
                for g in 0..s {
                    let eg = ring.mul(e, g);
                    let fg = ring.mul(f, g);
                    for h in 0..s {
                        let dh = ring.mul(d, h);
                        let fh = ring.mul(f, h);
                        for i in 0..s {
                            let m1 = ring.add(ring.mul(e, i), ring.neg(fh));
                            let m2 = ring.add(ring.mul(d, i), ring.neg(fg));
                            let m3 = ring.add(dh, ring.neg(eg));
                            let nm2 = ring.neg(m2);
                            // det = a*m1 - b*m2 + c*m3, swept over row 1
                            for a in 0..s {
                                let t1 = ring.mul(a, m1);
                                for b in 0..s {
                                    let t2 = ring.add(t1, ring.mul(b, nm2));
                                    for c in 0..s {
                                        if ring.is_unit(ring.add(t2, ring.mul(c, m3))) {
                                            count += 1;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict {
    Equal,
    NotEqual {
        formula: BigRational,
        enumeration: BigRational,
    },
}

/// Envelope accepted by [`volume_formula_oracle_check`].
pub const ORACLE_MAX_Q: u64 = 4;
pub const ORACLE_MAX_NV: u32 = 3;
pub const ORACLE_MAX_DV: u32 = 2;
pub const ORACLE_MAX_LENGTH: u32 = 2;

/// Compares the closed-form unit-group volume against
/// `(1 - 1/q)^{-1} * |GL(n_v, R)| / |R|^{n_v^2}` with `R` the chain ring of
/// residue size `q^{d_v}` and the given length, `|GL|` by enumeration.
/// The quotient is length-independent; each admissible length must agree.
pub fn volume_formula_oracle_check(
    spec: &LocalAlgebraSpec,
    length: u32,
) -> Result<OracleVerdict, OracleError> {
    let q = match spec.q {
        QValue::Num(q) => q,
        QValue::Symbolic => {
            return Err(OracleError::InvalidInput(
                "enumeration needs a numeric residue size".to_owned(),
            ))
        }
    };
    if q > ORACLE_MAX_Q
        || spec.n_v > ORACLE_MAX_NV
        || spec.d_v > ORACLE_MAX_DV
        || length == 0
        || length > ORACLE_MAX_LENGTH
    {
        return Err(OracleError::InvalidInput(format!(
            "outside the oracle envelope (q <= {ORACLE_MAX_Q}, n_v <= {ORACLE_MAX_NV}, \
             d_v <= {ORACLE_MAX_DV}, 1 <= length <= {ORACLE_MAX_LENGTH}): \
             q={q}, n_v={}, d_v={}, length={length}",
            spec.n_v, spec.d_v
        )));
    }
    spec.validate()
        .map_err(|e| OracleError::InvalidInput(e.to_string()))?;

    let ring_spec = FiniteRingSpec::residue_extension(q, spec.d_v, length)?;
    let ring = FiniteRing::build(ring_spec, ChainRealization::PolyU)?;
    let count = count_gl_by_enumeration(spec.n_v, &ring)?;

    let ring_size = BigUint::from(ring.size());
    let enumeration = BigRational::new(
        BigInt::from(q) * BigInt::from(count),
        BigInt::from(q - 1) * BigInt::from(ring_size.pow(spec.n_v * spec.n_v)),
    );

    let formula = volume_max_compact_mult(spec)
        .map_err(|e| OracleError::InvalidInput(e.to_string()))?
        .value
        .as_rational()
        .expect("mult volume at numeric q is a rational constant");

    if formula == enumeration {
        Ok(OracleVerdict::Equal)
    } else {
        Ok(OracleVerdict::NotEqual {
            formula,
            enumeration,
        })
    }
}

/// Largest abelian group [`abelian_index_oracle`] will enumerate.
pub const MAX_ABELIAN_ORDER: u64 = 200;

/// Index `[A : A^n]` for `A = prod Z/w_j`, counted by enumerating every
/// element, collecting the set of n-th powers, and dividing orders.
pub fn abelian_index_oracle(cyclic_orders: &[u64], n: u64) -> Result<u64, OracleError> {
    if n == 0 {
        return Err(OracleError::InvalidInput("n must be >= 1".to_owned()));
    }
    if cyclic_orders.contains(&0) {
        return Err(OracleError::InvalidInput(
            "cyclic orders must be positive".to_owned(),
        ));
    }
    let order: u128 = cyclic_orders.iter().map(|&w| u128::from(w)).product();
    if order > u128::from(MAX_ABELIAN_ORDER) {
        return Err(OracleError::GroupTooLarge {
            order,
            cap: MAX_ABELIAN_ORDER,
        });
    }
    let order = order as u64;
    let mut element = vec![0u64; cyclic_orders.len()];
    let mut powers = std::collections::HashSet::new();
    for _ in 0..order {
        let image: Vec<u64> = element
            .iter()
            .zip(cyclic_orders)
            .map(|(&x, &w)| x * n % w)
            .collect();
        powers.insert(image);
        // odometer step through the direct product
        for (x, &w) in element.iter_mut().zip(cyclic_orders) {
            *x += 1;
            if *x < w {
                break;
            }
            *x = 0;
        }
    }
    Ok(order / powers.len() as u64)
}

/// Every abelian group of order <= `max_order`, one per isomorphism class,
/// as its list of prime-power cyclic orders (primary decomposition). Order
/// 1 contributes the empty list.
pub fn abelian_groups_up_to(max_order: u64) -> Vec<Vec<u64>> {
    fn partitions(a: u32) -> Vec<Vec<u32>> {
        fn rec(rest: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest == 0 {
                out.push(prefix.clone());
                return;
            }
            for part in (1..=rest.min(max_part)).rev() {
                prefix.push(part);
                rec(rest - part, part, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(a, a, &mut Vec::new(), &mut out);
        out
    }

    let mut groups = vec![vec![]];
    for order in 2..=max_order {
        // primary decomposition: independent partition choice per prime
        let mut rest = order;
        let mut per_prime: Vec<Vec<Vec<u64>>> = Vec::new();
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut a = 0u32;
                while rest % p == 0 {
                    rest /= p;
                    a += 1;
                }
                per_prime.push(
                    partitions(a)
                        .into_iter()
                        .map(|parts| parts.into_iter().map(|e| p.pow(e)).collect())
                        .collect(),
                );
            }
            p += 1;
        }
        if rest > 1 {
            per_prime.push(vec![vec![rest]]);
        }
        let mut combos: Vec<Vec<u64>> = vec![vec![]];
        for choices in per_prime {
            combos = combos
                .iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |choice| {
                        let mut orders = prefix.clone();
                        orders.extend(choice);
                        orders
                    })
                })
                .collect();
        }
        groups.extend(combos);
    }
    groups
}
