//! Small-integer helpers: prime sieve and factorisation of moduli.

/// Primes `≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// `(p, e)` pairs of a positive integer by trial division.
pub fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor_small(n).iter().all(|&(_, e)| e == 1)
}

pub fn is_prime_small(n: u64) -> bool {
    n >= 2 && factor_small(n).len() == 1 && factor_small(n)[0].1 == 1
}

/// Legendre symbol test for `−1` being a square modulo an odd prime.
pub fn minus_one_is_square(p: u64) -> bool {
    p % 4 == 1
}
