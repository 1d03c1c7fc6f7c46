//! Exact modular arithmetic for the congruence `x^2 - x + 1 = 0 (mod n)`.
//!
//! Solutions are found prime power by prime power: a square root of `-3`
//! modulo `p^e` (Tonelli-Shanks followed by Hensel lifting) is combined
//! across the factorization with the Chinese Remainder Theorem and then
//! mapped to a root of `x^2 - x + 1` through `x = (v + 1) / 2 (mod n)`.
//!
//! All products are taken in `u128`, so every modulus must stay at or below
//! [`MAX_MODULUS`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by the public API. Squares of residues fit in
/// `u128` with room to spare and `n + v + 1` never overflows `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

fn check_bound(n: u64) -> Result<()> {
    if n > MAX_MODULUS {
        Err(Error::ModulusTooLarge(n))
    } else {
        Ok(())
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed value into `[0, m)`.
#[inline]
pub fn reduce_signed(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    (g == 1).then(|| reduce_signed(x, m))
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .filter(|&q| q <= MAX_MODULUS)
        .ok_or(Error::ModulusTooLarge(u64::MAX))
}

/// Canonical prime factorization `n = prod p_i^e_i` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of distinct prime factors.
    pub fn distinct_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(p, e)| (p, e, p.pow(e)))
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Trial-division factorization with early exit once `d^2 > remaining`.
pub fn factorize(n: u64) -> Result<Factorization> {
    check_bound(n)?;
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    // 6k +- 1 wheel
    let mut d = 5u64;
    while d.saturating_mul(d) <= rest {
        push(d, &mut rest);
        push(d + 2, &mut rest);
        d += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    matches!(factorize(n), Ok(f) if f.factors == [(n, 1)])
}

/// Square root of `r` modulo an odd prime `p` (`p` not dividing `r`).
///
/// Uses the `(p+1)/4` exponent when `p = 3 (mod 4)` and Tonelli-Shanks with
/// the smallest quadratic non-residue otherwise.
fn sqrt_mod_prime(r: u64, p: u64) -> Option<u64> {
    let r = r % p;
    if pow_mod(r, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(r, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(r, q, p);
    let mut x = pow_mod(r, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 1u32;
        let mut t2 = mul_mod(t, t, p);
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        x = mul_mod(x, b, p);
    }
    Some(x)
}

/// All `x` in `[0, p^e)` with `x^2 = r (mod p^e)`, sorted.
///
/// `p` must be an odd prime not dividing `r`. An empty vector means `r` is a
/// non-residue.
pub fn sqrt_mod_prime_power(r: i64, p: u64, e: u32) -> Result<Vec<u64>> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if e == 0 {
        return Err(Error::InvalidInput("exponent must be at least 1".into()));
    }
    if (r as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::InvalidInput(format!("{p} divides {r}")));
    }
    let q = checked_pow(p, e)?;
    let Some(mut x) = sqrt_mod_prime(reduce_signed(r as i128, p), p) else {
        return Ok(Vec::new());
    };
    // Newton/Hensel: x <- x - (x^2 - r) / (2x) modulo the next power.
    let mut modulus = p;
    for _ in 1..e {
        modulus *= p;
        let rr = reduce_signed(r as i128, modulus);
        let fx = (mul_mod(x, x, modulus) + modulus - rr) % modulus;
        let inv = inv_mod(mul_mod(2, x, modulus), modulus).expect("2x is a unit");
        x = (x + modulus - mul_mod(fx, inv, modulus)) % modulus;
    }
    let mut roots = vec![x % q, (q - x % q) % q];
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// Combine congruences `x = v_i (mod m_i)` with pairwise coprime moduli.
///
/// Returns `(x, M)` with `M = prod m_i` and `x` in `[0, M)`.
pub fn crt_combine(residues: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut acc = (0u64, 1u64);
    for &(v, m) in residues {
        if m == 0 {
            return Err(Error::InvalidInput("zero modulus".into()));
        }
        let g = gcd(acc.1, m);
        if g != 1 {
            return Err(Error::NonCoprimeModuli(acc.1, m));
        }
        let modulus = acc
            .1
            .checked_mul(m)
            .filter(|&mm| mm <= MAX_MODULUS)
            .ok_or(Error::ModulusTooLarge(u64::MAX))?;
        // x = acc.0 + acc.1 * k with acc.1 * k = v - acc.0 (mod m)
        let inv = inv_mod(acc.1 % m, m).expect("coprime");
        let diff = reduce_signed(v as i128 - acc.0 as i128, m);
        let k = mul_mod(diff, inv, m);
        let x = (acc.0 as u128 + acc.1 as u128 * k as u128) % modulus as u128;
        acc = (x as u64, modulus);
    }
    Ok(acc)
}

/// Every solution of `x^2 - x + 1 = 0 (mod n)` in `[0, n)`, ascending.
pub fn solve_frobenius_eq(n: u64) -> Result<Vec<u64>> {
    check_bound(n)?;
    if n == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    // x^2 - x + 1 is always odd
    if n.is_multiple_of(2) {
        return Ok(Vec::new());
    }
    let fact = factorize(n)?;
    let mut per_prime: Vec<Vec<(u64, u64)>> = Vec::with_capacity(fact.factors.len());
    for (p, e, q) in fact.prime_powers() {
        let roots = if p == 3 {
            // v^2 = -3 (mod 3) only at v = 0; no solutions mod 9
            if e == 1 {
                vec![0]
            } else {
                Vec::new()
            }
        } else {
            sqrt_mod_prime_power(-3, p, e)?
        };
        if roots.is_empty() {
            return Ok(Vec::new());
        }
        per_prime.push(roots.into_iter().map(|v| (v, q)).collect());
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_prime.len()];
    loop {
        let picked: Vec<(u64, u64)> = choice
            .iter()
            .zip(&per_prime)
            .map(|(&i, roots)| roots[i])
            .collect();
        let (v, _) = crt_combine(&picked)?;
        let a = if v % 2 == 1 {
            v.div_ceil(2)
        } else {
            (n + v).div_ceil(2)
        };
        out.push(a % n);
        // odometer over the per-prime root choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                out.sort_unstable();
                out.dedup();
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < per_prime[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Whether 6-valent first-kind Frobenius circulants of order `n` exist, and how many.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub n: u64,
    pub exists: bool,
    pub solutions: Vec<u64>,
    pub graph_count: u64,
}

pub fn classify(n: u64) -> Result<Classification> {
    if n < 7 {
        return Err(Error::OrderTooSmall { got: n, min: 7 });
    }
    let none = Classification {
        n,
        exists: false,
        solutions: Vec::new(),
        graph_count: 0,
    };
    if n % 6 != 1 {
        return Ok(none);
    }
    let fact = factorize(n)?;
    // a subgroup of order 6 in Z_n^* needs 6 | phi(n)
    if fact.euler_phi() % 6 != 0 {
        return Ok(none);
    }
    let solutions = solve_frobenius_eq(n)?;
    if solutions.is_empty() {
        return Ok(none);
    }
    if let Some(&(p, _)) = fact.factors.iter().find(|(p, _)| p % 6 != 1) {
        return Err(Error::Invariant(format!(
            "order {n} admits solutions but has prime factor {p} not congruent to 1 mod 6"
        )));
    }
    let l = fact.distinct_primes() as u32;
    if solutions.len() as u64 != 1u64 << l {
        return Err(Error::Invariant(format!(
            "order {n}: expected {} solutions, found {}",
            1u64 << l,
            solutions.len()
        )));
    }
    Ok(Classification {
        n,
        exists: true,
        solutions,
        graph_count: 1u64 << (l - 1),
    })
}

/// Lift a root `a_s` of `x^2 - x + 1` modulo `p^s` to a root modulo `p^(s+1)`.
///
/// The result is `a_s + p^s t` where `(2 a_s - 1) t = -(a_s^2 - a_s + 1)/p^s (mod p)`.
pub fn lift_solution(p: u64, a_s: u64, s: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::LiftPrecondition(format!("{p} is not prime")));
    }
    if s == 0 {
        return Err(Error::LiftPrecondition("level must be at least 1".into()));
    }
    let ps = checked_pow(p, s)?;
    let next = checked_pow(p, s + 1)?;
    let a = a_s % ps;
    let f = a as u128 * a as u128 - a as u128 + 1;
    if !f.is_multiple_of(ps as u128) {
        return Err(Error::LiftPrecondition(format!(
            "{a_s} is not a root modulo {p}^{s}"
        )));
    }
    let q = ((f / ps as u128) % p as u128) as u64;
    let deriv = (2 * (a % p) + p - 1) % p;
    let inv = inv_mod(deriv, p)
        .ok_or_else(|| Error::LiftPrecondition(format!("2*{a_s} - 1 is not invertible mod {p}")))?;
    let t = mul_mod((p - q) % p, inv, p);
    Ok((a + ps * t) % next)
}
