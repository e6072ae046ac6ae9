//! Canonical set partitions, cycle-form permutations and their spectra.
//!
//! Text forms: partitions as `1 3 6|2|4|5`, permutations as `(1 3 2)(4)`
//! with every cycle (fixed points included) written out, spectra as
//! `d1:d2:d3` with trailing zeros trimmed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::law::FiniteLaw;
use crate::Model;

/// Partition of `{1..n}`; blocks ascending, ordered by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and canonicalizes.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::domain("partition", "empty block"));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x > n {
                    return Err(Error::domain("partition", format!("element {x} outside 1..={n}")));
                }
                if seen[x] {
                    return Err(Error::domain("partition", format!("element {x} appears twice")));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
            return Err(Error::domain("partition", format!("element {missing} missing")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// From a block label per element (`labels[i]` for element `i + 1`).
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut order: Vec<usize> = Vec::new();
        let mut slot = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            let idx = *slot.entry(l).or_insert_with(|| {
                order.push(l);
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[idx].push(i + 1);
        }
        SetPartition { n, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|x| vec![x]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn spectrum(&self) -> SpectrumVector {
        SpectrumVector::from_sizes(self.blocks.iter().map(Vec::len))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (bi, block) in self.blocks.iter().enumerate() {
            if bi > 0 {
                f.write_str("|")?;
            }
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// `n` is the largest element mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.trim().split('|') {
            let block: Vec<usize> = part
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| Error::parse("partition", format!("{t:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            blocks.push(block);
        }
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        SetPartition::from_blocks(n, blocks)
    }
}

/// Permutation of `{1..n}` in cycle form; each cycle starts at its minimum,
/// cycles ordered by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclePermutation {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl CyclePermutation {
    pub fn identity(n: usize) -> Self {
        CyclePermutation {
            n,
            cycles: (1..=n).map(|x| vec![x]).collect(),
        }
    }

    /// `succ[i - 1] = sigma(i)`, values in `1..=n`.
    pub fn from_successors(succ: &[usize]) -> Result<Self> {
        let n = succ.len();
        let mut hit = vec![false; n + 1];
        for &s in succ {
            if s == 0 || s > n || hit[s] {
                return Err(Error::domain(
                    "permutation",
                    "successor map is not a bijection of 1..=n",
                ));
            }
            hit[s] = true;
        }
        let mut seen = vec![false; n + 1];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = succ[x - 1];
            }
            cycles.push(cycle);
        }
        Ok(CyclePermutation { n, cycles })
    }

    /// Validates and canonicalizes a list of cycles.
    pub fn from_cycles(n: usize, cycles: Vec<Vec<usize>>) -> Result<Self> {
        let mut succ = vec![0usize; n];
        for cycle in &cycles {
            if cycle.is_empty() {
                return Err(Error::domain("permutation", "empty cycle"));
            }
            for (i, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n {
                    return Err(Error::domain("permutation", format!("element {x} outside 1..={n}")));
                }
                if succ[x - 1] != 0 {
                    return Err(Error::domain("permutation", format!("element {x} appears twice")));
                }
                succ[x - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        if let Some(i) = succ.iter().position(|&s| s == 0) {
            return Err(Error::domain("permutation", format!("element {} missing", i + 1)));
        }
        CyclePermutation::from_successors(&succ)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// `sigma(i)` at index `i - 1`.
    pub fn successors(&self) -> Vec<usize> {
        let mut succ = vec![0; self.n];
        for cycle in &self.cycles {
            for (i, &x) in cycle.iter().enumerate() {
                succ[x - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        succ
    }

    pub fn spectrum(&self) -> SpectrumVector {
        SpectrumVector::from_sizes(self.cycles.iter().map(Vec::len))
    }
}

impl fmt::Display for CyclePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in &self.cycles {
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for CyclePermutation {
    type Err = Error;

    /// `n` is the largest element mentioned; omitted fixed points below it are
    /// filled in.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::parse("permutation", format!("expected '(' in {s:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::parse("permutation", format!("unclosed cycle in {s:?}")))?;
            let cycle: Vec<usize> = open[..close]
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| Error::parse("permutation", format!("{t:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            cycles.push(cycle);
            rest = open[close + 1..].trim_start();
        }
        let n = cycles.iter().flatten().copied().max().unwrap_or(0);
        let mut present = vec![false; n + 1];
        for &x in cycles.iter().flatten() {
            present[x] = true;
        }
        cycles.extend((1..=n).filter(|&x| !present[x]).map(|x| vec![x]));
        CyclePermutation::from_cycles(n, cycles)
    }
}

/// A set partition or a permutation, depending on the model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Partition(SetPartition),
    Permutation(CyclePermutation),
}

impl Structure {
    pub fn model(&self) -> Model {
        match self {
            Structure::Partition(_) => Model::Partition,
            Structure::Permutation(_) => Model::Permutation,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Structure::Partition(p) => p.n(),
            Structure::Permutation(p) => p.n(),
        }
    }

    pub fn component_count(&self) -> usize {
        match self {
            Structure::Partition(p) => p.block_count(),
            Structure::Permutation(p) => p.cycle_count(),
        }
    }

    pub fn spectrum(&self) -> SpectrumVector {
        match self {
            Structure::Partition(p) => p.spectrum(),
            Structure::Permutation(p) => p.spectrum(),
        }
    }

    pub fn parse(model: Model, s: &str) -> Result<Self> {
        Ok(match model {
            Model::Partition => Structure::Partition(s.parse()?),
            Model::Permutation => Structure::Permutation(s.parse()?),
        })
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Partition(p) => p.fmt(f),
            Structure::Permutation(p) => p.fmt(f),
        }
    }
}

/// Component-size profile `(D_1, D_2, ...)`, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectrumVector {
    counts: Vec<u64>,
}

impl SpectrumVector {
    pub fn from_counts(mut counts: Vec<u64>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        SpectrumVector { counts }
    }

    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = Vec::new();
        for s in sizes {
            if s == 0 {
                continue;
            }
            if counts.len() < s {
                counts.resize(s, 0);
            }
            counts[s - 1] += 1;
        }
        SpectrumVector::from_counts(counts)
    }

    /// `D_i`, 1-based.
    pub fn get(&self, size: usize) -> u64 {
        if size == 0 {
            return 0;
        }
        self.counts.get(size - 1).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `sum D_i`.
    pub fn component_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `sum i * D_i`.
    pub fn total_size(&self) -> u64 {
        self.counts.iter().enumerate().map(|(i, &d)| (i as u64 + 1) * d).sum()
    }

    pub fn largest_component(&self) -> usize {
        self.counts.len()
    }
}

impl fmt::Display for SpectrumVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("0");
        }
        for (i, d) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for SpectrumVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .trim()
            .split(':')
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::parse("spectrum", format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumVector::from_counts(counts))
    }
}

/// Exact law of a random spectrum.
pub type SpectrumLaw = FiniteLaw<SpectrumVector>;
