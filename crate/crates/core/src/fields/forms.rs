//! Class numbers from reduced binary quadratic forms `ax² + bxy + cy²`.

use num_integer::Integer;

use super::isqrt;

/// A primitive binary quadratic form `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

/// Reduced primitive positive definite forms of discriminant `d < 0`:
/// `|b| ≤ a ≤ c`, with `b ≥ 0` whenever `|b| = a` or `a = c`.
pub fn reduced_definite_forms(d: i64) -> Vec<Form> {
    assert!(d < 0);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            let f = Form { a, b, c };
            if f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out
}

/// Reduced primitive indefinite forms of non-square discriminant `d > 0`:
/// `0 < b < √d` and `√d − b < 2|a| < √d + b`.
pub fn reduced_indefinite_forms(d: i64) -> Vec<Form> {
    assert!(d > 0);
    let s = isqrt(d);
    let mut out = Vec::new();
    for b in 1..=s {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        // ac = (b² − d)/4 < 0
        let m = (d - b * b) / 4;
        let mut k = 1i64;
        while k * k <= m {
            if m % k == 0 {
                for abs_a in [k, m / k] {
                    if 2 * abs_a + b > s && 2 * abs_a - b <= s {
                        for a in [abs_a, -abs_a] {
                            let f = Form { a, b, c: -m / a };
                            if f.is_primitive() && !out.contains(&f) {
                                out.push(f);
                            }
                        }
                    }
                }
            }
            k += 1;
        }
    }
    out.sort();
    out
}

/// The right neighbour of a reduced indefinite form; it is properly
/// equivalent to the input and again reduced.
pub fn rho(f: Form, d: i64) -> Form {
    let s = isqrt(d);
    let m = 2 * f.c.abs();
    // unique b' ≡ −b (mod 2|c|) in (√d − 2|c|, √d)
    let b = s - (s + f.b).rem_euclid(m);
    let a = (b * b - d) / (4 * f.c);
    Form { a: f.c, b, c: a }
}

/// The number of proper equivalence classes of primitive forms of
/// discriminant `d > 0`, i.e. the number of ρ-cycles of reduced forms.
pub fn count_form_cycles(d: i64) -> u64 {
    let forms = reduced_indefinite_forms(d);
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for i in 0..forms.len() {
        if seen[i] {
            continue;
        }
        cycles += 1;
        let mut f = forms[i];
        loop {
            let j = forms.binary_search(&f).expect("ρ keeps forms reduced");
            if seen[j] {
                break;
            }
            seen[j] = true;
            f = rho(f, d);
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minus_23_has_three_reduced_forms() {
        let forms = reduced_definite_forms(-23);
        assert_eq!(
            forms,
            vec![Form { a: 1, b: 1, c: 6 }, Form { a: 2, b: -1, c: 3 }, Form { a: 2, b: 1, c: 3 }]
        );
    }

    #[test]
    fn rho_is_a_permutation_of_reduced_forms() {
        for d in [5i64, 8, 12, 13, 60, 229, 1001 * 4 + 1] {
            let forms = reduced_indefinite_forms(d);
            let mut images: Vec<Form> = forms.iter().map(|&f| rho(f, d)).collect();
            for f in &images {
                assert_eq!(f.disc(), d);
            }
            images.sort();
            assert_eq!(images, forms, "D={d}");
        }
    }

    #[test]
    fn narrow_counts() {
        // Q(√3) has a unit of norm +1 only, so narrow and wide class groups differ.
        assert_eq!(count_form_cycles(12), 2);
        assert_eq!(count_form_cycles(5), 1);
        assert_eq!(count_form_cycles(229), 3);
    }
}
