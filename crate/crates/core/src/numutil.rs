//! Small integer helpers shared across modules.

/// Trial-division primality for 64-bit integers; inputs here are residue
/// cardinalities and sieve bounds, so sqrt-range division is plenty.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut k = 7u64;
    while k.saturating_mul(k) <= n {
        for offset in [0, 4] {
            let c = k + offset;
            if c * c > n {
                break;
            }
            if n.is_multiple_of(c) {
                return false;
            }
        }
        k += 6;
    }
    true
}

/// Decomposes `n` as `p^e` with `p` prime, when possible.
pub(crate) fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    // The least prime factor must generate all of n.
    let mut p = n;
    for c in 2..=u64::isqrt(n) {
        if n.is_multiple_of(c) {
            p = c;
            break;
        }
    }
    if p == n {
        return Some((n, 1));
    }
    let mut rest = n;
    let mut e = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Exact integer square root test.
pub(crate) fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = u64::isqrt(n);
    (r * r == n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_classification() {
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(1024), Some((2, 10)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(100), None);
        assert_eq!(prime_power(125), Some((5, 3)));
    }

    #[test]
    fn primality_small_range() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
    }

    #[test]
    fn sqrt_detection() {
        assert_eq!(perfect_sqrt(49), Some(7));
        assert_eq!(perfect_sqrt(50), None);
        assert_eq!(perfect_sqrt(0), Some(0));
    }
}
