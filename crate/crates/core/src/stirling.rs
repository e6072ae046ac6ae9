//! Exact Stirling numbers and brute-force enumeration oracles.
//!
//! `s(n, k)` is always the unsigned first-kind number (permutations of `n`
//! elements with `k` cycles) and `S(n, k)` the second-kind number (set
//! partitions of `n` elements into `k` blocks).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::structures::{CyclePermutation, SetPartition, SpectrumLaw, SpectrumVector, Structure};
use crate::{Kind, Model};

/// Default largest `n` accepted by the enumeration oracles.
pub const DEFAULT_ENUM_CAP: usize = 12;

/// `s(n, k)` (unsigned) or `S(n, k)`; zero outside the triangle.
///
/// Cost is `O(n * min(k, n - k))` big-integer operations: the diagonal
/// recurrence is used when `n - k` is the smaller side.
pub fn stirling(kind: Kind, n: usize, k: usize) -> BigInt {
    if k > n || (k == 0 && n != 0) {
        return BigInt::zero();
    }
    let r = n - k;
    if r <= k {
        diagonal(kind, n, r).pop().expect("diagonal has r + 1 entries")
    } else {
        row(kind, n, k).pop().expect("row has k + 1 entries")
    }
}

/// `[Stirling(n, 0), ..., Stirling(n, k_max)]` via the row recurrence.
pub fn row(kind: Kind, n: usize, k_max: usize) -> Vec<BigInt> {
    let mut cur = vec![BigInt::zero(); k_max + 1];
    cur[0] = BigInt::one();
    for m in 1..=n {
        // In-place update from the top keeps cur[k - 1] at the previous row.
        for k in (1..=k_max.min(m)).rev() {
            let factor = match kind {
                Kind::First => m - 1,
                Kind::Second => k,
            };
            let prev = std::mem::take(&mut cur[k]);
            cur[k] = prev * factor + &cur[k - 1];
        }
        cur[0] = BigInt::zero();
    }
    cur
}

/// `[Stirling(n, n), Stirling(n, n - 1), ..., Stirling(n, n - r_max)]`.
///
/// With `T_m[j] = Stirling(m, m - j)` the two recurrences become
/// `T_m[j] = T_{m-1}[j] + (m - 1) T_{m-1}[j-1]` (first kind) and
/// `T_m[j] = T_{m-1}[j] + (m - j) T_{m-1}[j-1]` (second kind).
pub fn diagonal(kind: Kind, n: usize, r_max: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); r_max + 1];
    t[0] = BigInt::one();
    for m in 1..=n {
        for j in (1..=r_max.min(m)).rev() {
            let factor = match kind {
                Kind::First => m - 1,
                Kind::Second => m - j,
            };
            if factor == 0 {
                continue;
            }
            let add = &t[j - 1] * factor;
            t[j] += add;
        }
    }
    t
}

/// Memoized full triangle `0 <= k <= n <= n_max`.
#[derive(Clone, Debug)]
pub struct StirlingTable {
    kind: Kind,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(kind: Kind, n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::one()]);
        for m in 1..=n_max {
            let prev = &rows[m - 1];
            let mut next = vec![BigInt::zero(); m + 1];
            for k in 1..=m {
                let left = if k < m { prev[k].clone() } else { BigInt::zero() };
                let factor = match kind {
                    Kind::First => m - 1,
                    Kind::Second => k,
                };
                next[k] = left * factor + &prev[k - 1];
            }
            rows.push(next);
        }
        StirlingTable { kind, rows }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Panics if `n > n_max`; zero for `k > n`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        self.rows[n].get(k).cloned().unwrap_or_default()
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n]
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Calls `visit` with the restricted-growth labels (`labels[i]` is the block
/// of element `i + 1`, blocks numbered by first appearance) of every
/// partition of `{1..n}` into exactly `k` blocks.
pub fn for_each_partition_labels(n: usize, k: usize, cap: usize, mut visit: impl FnMut(&[usize])) -> Result<()> {
    check_cap(n, cap)?;
    if k > n || (k == 0 && n > 0) {
        return Ok(());
    }
    if n == 0 {
        visit(&[]);
        return Ok(());
    }
    fn rec(labels: &mut Vec<usize>, n: usize, k: usize, used: usize, visit: &mut dyn FnMut(&[usize])) {
        let i = labels.len();
        if i == n {
            if used == k {
                visit(labels);
            }
            return;
        }
        let remaining = n - i;
        // Reuse an existing block only if the rest can still open the missing ones.
        if used + remaining > k {
            for l in 0..used {
                labels.push(l);
                rec(labels, n, k, used, visit);
                labels.pop();
            }
        }
        if used < k {
            labels.push(used);
            rec(labels, n, k, used + 1, visit);
            labels.pop();
        }
    }
    let mut labels = Vec::with_capacity(n);
    rec(&mut labels, n, k, 0, &mut visit);
    Ok(())
}

/// Calls `visit` with the successor map (`succ[i] = sigma(i + 1)`, 1-based
/// values) of every permutation of `{1..n}` with exactly `k` cycles.
///
/// Built by inserting `m = 1..n` in turn, either as a new fixed point or
/// directly after one of the elements already placed.
pub fn for_each_permutation_succ(n: usize, k: usize, cap: usize, mut visit: impl FnMut(&[usize])) -> Result<()> {
    check_cap(n, cap)?;
    if k > n || (k == 0 && n > 0) {
        return Ok(());
    }
    fn rec(succ: &mut Vec<usize>, n: usize, k: usize, cycles: usize, visit: &mut dyn FnMut(&[usize])) {
        let m = succ.len() + 1;
        if m > n {
            if cycles == k {
                visit(succ);
            }
            return;
        }
        let remaining = n - m + 1;
        if cycles < k {
            succ.push(m);
            rec(succ, n, k, cycles + 1, visit);
            succ.pop();
        }
        if cycles + remaining > k {
            for x in 1..m {
                let old = succ[x - 1];
                succ[x - 1] = m;
                succ.push(old);
                rec(succ, n, k, cycles, visit);
                succ.pop();
                succ[x - 1] = old;
            }
        }
    }
    let mut succ = Vec::with_capacity(n);
    rec(&mut succ, n, k, 0, &mut visit);
    Ok(())
}

/// Every structure with `k` components, each exactly once, sorted canonically.
pub fn enum_structures(model: Model, n: usize, k: usize, cap: usize) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    match model {
        Model::Partition => for_each_partition_labels(n, k, cap, |labels| {
            out.push(Structure::Partition(SetPartition::from_labels(labels)));
        })?,
        Model::Permutation => for_each_permutation_succ(n, k, cap, |succ| {
            let perm = CyclePermutation::from_successors(succ).expect("enumerated map is a bijection");
            out.push(Structure::Permutation(perm));
        })?,
    }
    out.sort_unstable();
    Ok(out)
}

/// Exact spectrum law of a uniform structure with `k` components.
pub fn exact_spectrum_law(model: Model, n: usize, k: usize, cap: usize) -> Result<SpectrumLaw> {
    check_cap(n, cap)?;
    if k == 0 || k > n {
        return Err(Error::domain("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut tally: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut sizes = vec![0usize; n + 1];
    match model {
        Model::Partition => for_each_partition_labels(n, k, cap, |labels| {
            sizes[..k].fill(0);
            for &l in labels {
                sizes[l] += 1;
            }
            *tally.entry(size_profile(&sizes[..k], n)).or_default() += 1;
        })?,
        Model::Permutation => {
            let mut seen = vec![false; n + 1];
            for_each_permutation_succ(n, k, cap, |succ| {
                seen.fill(false);
                let mut lens = Vec::with_capacity(k);
                for start in 1..=n {
                    if seen[start] {
                        continue;
                    }
                    let mut len = 0;
                    let mut x = start;
                    while !seen[x] {
                        seen[x] = true;
                        len += 1;
                        x = succ[x - 1];
                    }
                    lens.push(len);
                }
                *tally.entry(size_profile(&lens, n)).or_default() += 1;
            })?
        }
    }
    Ok(SpectrumLaw::from_counts(
        tally
            .into_iter()
            .map(|(counts, c)| (SpectrumVector::from_counts(counts), c)),
    ))
}

fn size_profile(sizes: &[usize], n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n];
    for &s in sizes {
        counts[s - 1] += 1;
    }
    counts
}
