//! The quadratic character `n ↦ (D|n)` attached to a fundamental discriminant.

use crate::error::{Error, Result};

/// Jacobi symbol `(a|n)` for odd `n > 0`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(D|2)`.
fn kronecker_two(d: i64) -> i8 {
    match d.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol `(D|n)` for `n > 0`.
///
/// For a fundamental discriminant this is the primitive real character of
/// conductor `|D|`; it is completely multiplicative in `n`.
pub fn kronecker_chi(d: i64, n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::domain("kronecker symbol (D|0) is not used; n must be positive"));
    }
    Ok(kronecker_unchecked(d, n))
}

pub(crate) fn kronecker_unchecked(d: i64, mut n: u64) -> i8 {
    let mut t = 1i8;
    while n.is_multiple_of(2) {
        n /= 2;
        t *= kronecker_two(d);
        if t == 0 {
            return 0;
        }
    }
    t * jacobi(d, n)
}

/// All values `χ_D(0), …, χ_D(|D|-1)` over one period.
///
/// Built from a smallest-prime-factor sieve so that only primes need a
/// Jacobi-symbol evaluation.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    disc: i64,
    values: Vec<i8>,
}

impl CharacterTable {
    pub fn new(d: i64) -> Self {
        let q = d.unsigned_abs() as usize;
        let mut spf = vec![0u32; q.max(2)];
        for i in 2..q {
            if spf[i] == 0 {
                let mut j = i;
                while j < q {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut values = vec![0i8; q.max(1)];
        if q > 1 {
            values[1] = 1;
        }
        for a in 2..q {
            let p = spf[a] as usize;
            values[a] = if p == a {
                kronecker_unchecked(d, a as u64)
            } else {
                values[p] * values[a / p]
            };
        }
        CharacterTable { disc: d, values }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn modulus(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn get(&self, n: u64) -> i8 {
        self.values[(n % self.modulus()) as usize]
    }

    /// `(a, χ(a))` for `1 ≤ a < |D|`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.values.iter().enumerate().skip(1).map(|(a, &c)| (a as u64, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert_eq!(kronecker_chi(-4, 3).unwrap(), -1);
        assert_eq!(kronecker_chi(-4, 2).unwrap(), 0);
        assert_eq!(kronecker_chi(5, 2).unwrap(), -1);
        assert!(kronecker_chi(5, 0).is_err());
    }

    #[test]
    fn three_is_inert_in_gaussian_integers() {
        // 3 = x^2 + y^2 has no solution, so 3 stays prime in Z[i].
        let splits = (0..3i64).any(|x| (0..3i64).any(|y| x * x + y * y == 3));
        assert!(!splits);
        assert_eq!(kronecker_chi(-4, 3).unwrap(), -1);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        for d in [-3i64, -4, -7, -8, -23, -163, 5, 8, 12, 229, 1001 * 4 + 1] {
            let t = CharacterTable::new(d);
            for n in 1..3 * d.unsigned_abs() {
                assert_eq!(t.get(n), kronecker_unchecked(d, n), "D={d} n={n}");
            }
        }
    }
}
