//! Rigorous evaluation of Euler-type products over primes.
//!
//! Factors have the closed form `(1 - p^e)` (optionally inverted) with
//! every exponent `e <= -2`, so log-factors are summable and the tail
//! beyond a sieve bound `P` admits the elementary estimate
//!
//! `sum_{p > P} p^-2  <=  2 * ((6M+1)^-2 + 1/(6*(6M+1)))`, `M = floor(P/6)`,
//!
//! because every prime above 3 is congruent to +-1 mod 6. Partial products
//! run in directed-rounded f64 intervals, so the reported error bound is a
//! true enclosure of |result - limit|.

use super::{AdelicError, TailRule};
use num_rational::BigRational;
use num_traits::Zero;

pub const DEFAULT_PRIME_CAP: u64 = 1_000_000;
pub const MAX_PRIME_CAP: u64 = 100_000_000;
pub const MIN_PRIME_CAP: u64 = 100;

/// All primes `<= cap` in increasing order.
pub fn primes_up_to(cap: u64) -> Vec<u64> {
    let cap = cap as usize;
    let mut composite = vec![false; cap + 1];
    let mut primes = Vec::new();
    for n in 2..=cap {
        if !composite[n] {
            primes.push(n as u64);
            let mut k = n * n;
            while k <= cap {
                composite[k] = true;
                k += n;
            }
        }
    }
    primes
}

/// Closed f64 interval with outward rounding on every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses an exact rational: nearest f64 widened by a relative
    /// 2^-48 margin, far beyond the few-ulp conversion error.
    pub fn from_rational(r: &BigRational) -> Self {
        use num_traits::ToPrimitive;
        let f = r.to_f64().unwrap_or(f64::NAN);
        let pad = f.abs() * 3.6e-15 + f64::MIN_POSITIVE;
        Interval {
            lo: (f - pad).next_down(),
            hi: (f + pad).next_up(),
        }
    }

    pub fn mul(self, o: Interval) -> Self {
        let cands = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = cands.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Reciprocal; requires an interval strictly away from zero.
    pub fn recip(self) -> Result<Self, AdelicError> {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            return Err(AdelicError::InvalidInput(
                "interval straddles zero; cannot invert".to_owned(),
            ));
        }
        Ok(Interval {
            lo: (1.0 / self.hi).next_down(),
            hi: (1.0 / self.lo).next_up(),
        })
    }

    pub fn mid(self) -> f64 {
        self.lo / 2.0 + self.hi / 2.0
    }

    pub fn half_width(self) -> f64 {
        ((self.hi - self.lo) / 2.0).next_up()
    }
}

/// Upper bound for `sum_{p > bound, p prime} p^-2`, valid for bound >= 30.
pub fn prime_square_tail_bound(bound: u64) -> f64 {
    let m = bound / 6;
    let x = (6 * m + 1) as f64;
    2.0 * (1.0 / (x * x) + 1.0 / (6.0 * x)) * (1.0 + 1e-12)
}

/// One factor of the product at prime p, as a rigorous interval.
fn factor_interval(rule: &TailRule, p: u64) -> Result<Interval, AdelicError> {
    let pf = p as f64;
    let mut acc = Interval::point(1.0);
    for &e in rule.exponents() {
        // p^e with e <= -2: powi is within 1 ulp per multiplication; widen
        // generously rather than track exactly
        let raw = pf.powi(e as i32);
        let term = Interval {
            lo: (raw * (1.0 - 1e-13)).next_down(),
            hi: (raw * (1.0 + 1e-13)).next_up(),
        };
        let one_minus = Interval {
            lo: (1.0 - term.hi).next_down(),
            hi: (1.0 - term.lo).next_up(),
        };
        acc = acc.mul(one_minus);
    }
    if rule.inverted() {
        acc = acc.recip()?;
    }
    Ok(acc)
}

pub(crate) struct EulerOutcome {
    pub value: Interval,
    /// Sieve bound actually needed to certify the requested tolerance, or
    /// the cap when the tolerance was not reached.
    #[cfg_attr(not(test), allow(dead_code))]
    pub primes_used: u64,
    pub converged: bool,
}

/// Product of `rule` factors over all primes not in `exclude`, enclosed
/// rigorously: partial product over sieved primes times an interval
/// `[e^-L, e^L]` bounding the infinite tail. Stops at the first checkpoint
/// whose enclosure is tighter than `tolerance`.
pub(crate) fn euler_product(
    rule: &TailRule,
    exclude: &[u64],
    tolerance: f64,
    prime_cap: u64,
) -> Result<EulerOutcome, AdelicError> {
    rule.validate()?;
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(AdelicError::InvalidInput(
            "tolerance must be a positive finite number".to_owned(),
        ));
    }
    if !(MIN_PRIME_CAP..=MAX_PRIME_CAP).contains(&prime_cap) {
        return Err(AdelicError::InvalidInput(format!(
            "prime cap must lie in [{MIN_PRIME_CAP}, {MAX_PRIME_CAP}]"
        )));
    }
    if rule.is_trivial() {
        return Ok(EulerOutcome {
            value: Interval::point(1.0),
            primes_used: 0,
            converged: true,
        });
    }

    let primes = primes_up_to(prime_cap);
    let n_exp = rule.exponents().len() as f64;
    let mut partial = Interval::point(1.0);
    let mut checkpoint = 1024u64;

    let enclose = |partial: Interval, bound: u64| -> Interval {
        // |sum_{p > bound} log factor(p)| <= 1.001 * n_exp * tail
        let l = 1.001 * n_exp * prime_square_tail_bound(bound);
        let rem = (l.exp_m1() * (1.0 + 1e-12)).next_up();
        Interval {
            lo: (partial.lo * (1.0 - rem)).next_down(),
            hi: (partial.hi * (1.0 + rem)).next_up(),
        }
    };

    for &p in &primes {
        if p > checkpoint {
            let total = enclose(partial, checkpoint);
            if total.half_width() <= tolerance {
                return Ok(EulerOutcome {
                    value: total,
                    primes_used: checkpoint,
                    converged: true,
                });
            }
            while p > checkpoint {
                checkpoint *= 2;
            }
        }
        if exclude.contains(&p) {
            continue;
        }
        partial = partial.mul(factor_interval(rule, p)?);
    }

    let total = enclose(partial, prime_cap);
    Ok(EulerOutcome {
        value: total,
        primes_used: prime_cap,
        converged: total.half_width() <= tolerance,
    })
}

/// Midpoint of an interval as an exact rational (f64 midpoints are exact
/// binary rationals).
pub(crate) fn interval_to_rational(v: Interval) -> BigRational {
    BigRational::from_float(v.mid()).unwrap_or_else(BigRational::zero)
}
