//! Sums over the symmetric group of terms of the form
//! `Π_m f[m][σ(m)] · Π_{l<l', σ(l)>σ(l')} g[σ(l)][σ(l')]`.
//!
//! Permutations are visited depth-first in lexicographic order with prefix
//! products. The outer split is always over `σ(1)`, so the summation order
//! (and therefore the rounding) does not depend on the number of threads.

use std::ops::{Add, Mul};
#[cfg(feature = "parallel")]
use std::sync::OnceLock;

#[cfg(test)]
use num_complex::Complex64;
use num_traits::Zero;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const MAX_PERM_N: usize = 9;

/// Entry type of the sums: `Complex64`, or a double-double complex where
/// cancellation is severe.
pub(crate) trait Scalar: Copy + Send + Sync + PartialEq + Zero + Add<Output = Self> + Mul<Output = Self> {}

impl<T: Copy + Send + Sync + PartialEq + Zero + Add<Output = T> + Mul<Output = T>> Scalar for T {}

#[cfg(test)]
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
#[cfg(test)]
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Thread pool honoring `LATTICE_LAB_THREADS`, or `None` for rayon's global pool.
#[cfg(feature = "parallel")]
pub(crate) fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var("LATTICE_LAB_THREADS").ok()?.trim().parse().ok()?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().ok()
    })
    .as_ref()
}

/// Pairwise (tree) sum in a fixed order.
pub(crate) fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// `f` and `g` are `n × n`, row-major: `f[m * n + s]`, `g[a * n + b]`.
pub(crate) fn perm_sum<T: Scalar>(n: usize, f: &[T], g: &[T]) -> T {
    assert!((1..=MAX_PERM_N).contains(&n));
    assert_eq!(f.len(), n * n);
    assert_eq!(g.len(), n * n);
    let branch = |first: usize| -> T {
        let mut placed = vec![first];
        let mut acc = T::zero();
        dfs(n, f, g, &mut placed, 1u32 << first, f[first], &mut acc);
        acc
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<T> = if n >= 6 {
        let run = || (0..n).into_par_iter().map(branch).collect();
        match pool() {
            Some(p) => p.install(run),
            None => run(),
        }
    } else {
        (0..n).map(branch).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<T> = (0..n).map(branch).collect();
    pairwise_sum(&parts)
}

fn dfs<T: Scalar>(n: usize, f: &[T], g: &[T], placed: &mut Vec<usize>, used: u32, prefix: T, acc: &mut T) {
    let m = placed.len();
    if m == n {
        *acc = *acc + prefix;
        return;
    }
    for s in 0..n {
        if used & (1 << s) != 0 {
            continue;
        }
        let mut w = prefix * f[m * n + s];
        for &a in placed.iter() {
            if a > s {
                w = w * g[a * n + s];
            }
        }
        if w.is_zero() {
            continue;
        }
        placed.push(s);
        dfs(n, f, g, placed, used | (1 << s), w, acc);
        placed.pop();
    }
}

/// Inversion pairs `(σ(l), σ(l'))` with `l < l'` and `σ(l) > σ(l')`.
pub(crate) fn inversions(sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 0..sigma.len() {
        for lp in l + 1..sigma.len() {
            if sigma[l] > sigma[lp] {
                out.push((sigma[l], sigma[lp]));
            }
        }
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
#[cfg(test)]
pub(crate) fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}
