//! Set partitions of `{1..n}` under the refinement order.
//!
//! `η ≤ π` when `π` refines `η`, so the one-block partition is the minimum
//! and the partition into singletons is the maximum. The inclusion order on
//! flats of the braid matroid is the opposite order: a partition with fewer
//! blocks is the larger flat.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::limits::Limits;

#[derive(Debug)]
struct Inner {
    n: usize,
    blocks: Vec<Vec<usize>>,
    /// `label[i - 1]` is the index of the block containing `i`.
    label: Vec<usize>,
}

/// A set partition in canonical form: blocks sorted ascending, blocks ordered
/// by their minimum.
///
/// Cloning is cheap; the blocks live behind an `Arc`.
#[derive(Clone)]
pub struct Partition(Arc<Inner>);

impl Partition {
    /// Builds a partition from arbitrary blocks, validating that they are
    /// disjoint, nonempty and cover `{1..n}`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("partition", "n must be positive"));
        }
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid("partition", "empty block"));
            }
            for &i in block {
                if i == 0 || i > n {
                    return Err(Error::invalid(
                        "partition",
                        format!("element {i} outside 1..{n}"),
                    ));
                }
                if label[i - 1] != usize::MAX {
                    return Err(Error::invalid(
                        "partition",
                        format!("element {i} appears twice"),
                    ));
                }
                label[i - 1] = b;
            }
        }
        if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::invalid(
                "partition",
                format!("element {} is not covered", i + 1),
            ));
        }
        Ok(Self::from_labels(&label))
    }

    /// Builds the partition whose blocks are the fibres of `labels`
    /// (`labels[i - 1]` is an arbitrary tag for element `i`).
    pub fn from_labels<L: Eq + Hash + Copy>(labels: &[L]) -> Self {
        let n = labels.len();
        assert!(n > 0, "partition of the empty set");
        let mut index: HashMap<L, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut label = Vec::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            let b = *index.entry(*l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i + 1);
            label.push(b);
        }
        Partition(Arc::new(Inner { n, blocks, label }))
    }

    /// The one-block partition `⊥`.
    pub fn bottom(n: usize) -> Self {
        Self::from_labels(&vec![0usize; n])
    }

    /// The partition into singletons `⊤`.
    pub fn top(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.0.blocks.len()
    }

    /// Index of the block containing mark `i` (1-based mark).
    pub fn block_index(&self, i: usize) -> usize {
        self.0.label[i - 1]
    }

    pub fn block_of(&self, i: usize) -> &[usize] {
        &self.0.blocks[self.block_index(i)]
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.0.label[i - 1] == self.0.label[j - 1]
    }

    /// Block labels, one per element.
    pub fn labels(&self) -> &[usize] {
        &self.0.label
    }

    pub fn is_bottom(&self) -> bool {
        self.num_blocks() == 1
    }

    pub fn is_top(&self) -> bool {
        self.num_blocks() == self.n()
    }

    /// Block minima, in block order.
    pub fn minima(&self) -> Vec<usize> {
        self.0.blocks.iter().map(|b| b[0]).collect()
    }

    fn same_n(&self, other: &Partition) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::domain(format!(
                "partitions of different sets: n = {} and n = {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    /// `self ≤ other`: every block of `other` lies inside a block of `self`.
    pub fn leq(&self, other: &Partition) -> Result<bool> {
        self.same_n(other)?;
        Ok(self.leq_unchecked(other))
    }

    pub(crate) fn leq_unchecked(&self, other: &Partition) -> bool {
        if self.num_blocks() > other.num_blocks() {
            return false;
        }
        other.blocks().iter().all(|b| {
            let l = self.block_index(b[0]);
            b.iter().all(|&i| self.block_index(i) == l)
        })
    }

    /// `self < other`.
    pub fn lt(&self, other: &Partition) -> Result<bool> {
        Ok(self.leq(other)? && self != other)
    }

    pub fn comparable(&self, other: &Partition) -> Result<bool> {
        Ok(self.leq(other)? || other.leq_unchecked(self))
    }

    /// Greatest lower bound: the finest common coarsening.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.same_n(other)?;
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in [self, other] {
            for b in p.blocks() {
                for w in b.windows(2) {
                    let (a, c) = (find(&mut parent, w[0] - 1), find(&mut parent, w[1] - 1));
                    if a != c {
                        parent[a.max(c)] = a.min(c);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(Partition::from_labels(&roots))
    }

    /// Least upper bound: the common refinement.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.same_n(other)?;
        let labels: Vec<(usize, usize)> = self
            .labels()
            .iter()
            .zip(other.labels())
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(Partition::from_labels(&labels))
    }

    /// `|B(π)| − 2`; the one-block partition has dimension −1.
    pub fn dim(&self) -> isize {
        self.num_blocks() as isize - 2
    }

    /// `n + 1 − |B(π)|`.
    pub fn codim(&self) -> isize {
        self.n() as isize + 1 - self.num_blocks() as isize
    }

    /// Renders the partition, e.g. `12|3`. For `n ≥ 10` elements inside a
    /// block are separated by dots.
    pub fn label(&self) -> String {
        let sep = if self.n() >= 10 { "." } else { "" };
        self.blocks()
            .iter()
            .map(|b| join_marks(b, sep))
            .collect::<Vec<_>>()
            .join("|")
    }
}

pub(crate) fn join_marks(marks: &[usize], sep: &str) -> String {
    marks
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.n == other.0.n && self.0.label == other.0.label)
    }
}

impl Eq for Partition {}

impl Hash for Partition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.n.hash(state);
        self.0.label.hash(state);
    }
}

/// Total order used for listings: by number of blocks, then blocks
/// lexicographically. Unrelated to the lattice order.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n()
            .cmp(&other.n())
            .then(self.num_blocks().cmp(&other.num_blocks()))
            .then_with(|| self.blocks().cmp(other.blocks()))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({})", self.label())
    }
}

/// An entry of an equation set: a pair of marks, or the extra coordinate `t`
/// that appears when the finer partition is `⊤`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NEntry {
    Pair(usize, usize),
    T,
}

/// The equation set for `ρ ≤ π`: within each block of `ρ`, pair its minimum
/// with the minimum of every other block of `π` it contains. Sorted
/// lexicographically, with `t` last when requested and `π = ⊤`.
pub fn n_set(rho: &Partition, pi: &Partition, augment_top: bool) -> Result<Vec<NEntry>> {
    if !rho.leq(pi)? {
        return Err(Error::domain(format!(
            "n_set needs {rho} <= {pi}, which fails"
        )));
    }
    let mut out = Vec::with_capacity(pi.num_blocks() - rho.num_blocks() + 1);
    for b in pi.blocks() {
        let outer_min = rho.block_of(b[0])[0];
        if outer_min != b[0] {
            out.push(NEntry::Pair(outer_min, b[0]));
        }
    }
    out.sort();
    if augment_top && pi.is_top() {
        out.push(NEntry::T);
    }
    Ok(out)
}

/// All set partitions of `{1..n}`, sorted by (number of blocks, blocks).
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_with(n, &Limits::from_env())
}

pub fn enumerate_partitions_with(n: usize, limits: &Limits) -> Result<Vec<Partition>> {
    Limits::check("partition enumeration", n, limits.partitions)?;
    Ok(all_partitions(n))
}

/// Unguarded enumeration via restricted growth strings.
pub(crate) fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == rgs.len() {
            out.push(Partition::from_labels(rgs));
            return;
        }
        for l in 0..=max + 1 {
            rgs[i] = l;
            rec(i + 1, max.max(l), rgs, out);
        }
    }
    if n > 0 {
        rgs[0] = 0;
        rec(1, 0, &mut rgs, &mut out);
    }
    out.sort();
    out
}

/// A strictly increasing chain in `Lₙ ∖ {⊥}`. The empty chain is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionChain {
    n: usize,
    elements: Vec<Partition>,
}

impl PartitionChain {
    pub fn new(n: usize, elements: Vec<Partition>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("chain", "n must be positive"));
        }
        for (k, p) in elements.iter().enumerate() {
            if p.n() != n {
                return Err(Error::invalid(
                    "chain",
                    format!("element {k} is a partition of {} marks, not {n}", p.n()),
                ));
            }
            if p.is_bottom() {
                return Err(Error::invalid("chain", "chains may not contain the one-block partition"));
            }
        }
        for w in elements.windows(2) {
            if !(w[0].leq_unchecked(&w[1]) && w[0] != w[1]) {
                return Err(Error::invalid(
                    "chain",
                    format!("{} < {} fails", w[0], w[1]),
                ));
            }
        }
        Ok(PartitionChain { n, elements })
    }

    pub fn empty(n: usize) -> Self {
        PartitionChain {
            n,
            elements: Vec::new(),
        }
    }

    pub(crate) fn new_unchecked(n: usize, elements: Vec<Partition>) -> Self {
        PartitionChain { n, elements }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `ρ_k` with the conventions `ρ_0 = ⊥` and `ρ_{ℓ+1} = ⊤`.
    pub fn rho(&self, k: usize) -> Partition {
        match k {
            0 => Partition::bottom(self.n),
            k if k <= self.len() => self.elements[k - 1].clone(),
            _ => Partition::top(self.n),
        }
    }

    /// Drops `ρ_k` for every `k` in `levels` (1-based).
    pub fn without(&self, levels: &[usize]) -> PartitionChain {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .filter(|(k, _)| !levels.contains(&(k + 1)))
            .map(|(_, p)| p.clone())
            .collect();
        PartitionChain::new_unchecked(self.n, elements)
    }

    pub fn label(&self) -> String {
        if self.elements.is_empty() {
            return "∅".to_string();
        }
        self.elements
            .iter()
            .map(Partition::label)
            .collect::<Vec<_>>()
            .join(" < ")
    }
}

impl fmt::Display for PartitionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All chains in `Lₙ ∖ {⊥}`, the empty chain first, optionally restricted to
/// elements of dimension at most `max_dim`.
pub fn enumerate_chains(n: usize, max_dim: Option<isize>) -> Result<Vec<PartitionChain>> {
    enumerate_chains_with(n, max_dim, &Limits::from_env(), Exec::Sequential)
}

pub fn enumerate_chains_with(
    n: usize,
    max_dim: Option<isize>,
    limits: &Limits,
    exec: Exec,
) -> Result<Vec<PartitionChain>> {
    Limits::check("chain enumeration", n, limits.chains)?;
    let elems: Vec<Partition> = all_partitions(n)
        .into_iter()
        .filter(|p| !p.is_bottom() && max_dim.is_none_or(|d| p.dim() <= d))
        .collect();
    // Sorted by block count, so every strict successor of `elems[i]` has a
    // larger index.
    let up: Vec<Vec<usize>> = exec.map(&(0..elems.len()).collect::<Vec<_>>(), |&i| {
        (i + 1..elems.len())
            .filter(|&j| {
                elems[i].num_blocks() < elems[j].num_blocks() && elems[i].leq_unchecked(&elems[j])
            })
            .collect()
    });
    fn rec(
        i: usize,
        stack: &mut Vec<usize>,
        up: &[Vec<usize>],
        elems: &[Partition],
        n: usize,
        out: &mut Vec<PartitionChain>,
    ) {
        stack.push(i);
        out.push(PartitionChain::new_unchecked(
            n,
            stack.iter().map(|&k| elems[k].clone()).collect(),
        ));
        for &j in &up[i] {
            rec(j, stack, up, elems, n, out);
        }
        stack.pop();
    }
    let starts: Vec<usize> = (0..elems.len()).collect();
    let per_start = exec.map(&starts, |&i| {
        let mut out = Vec::new();
        rec(i, &mut Vec::new(), &up, &elems, n, &mut out);
        out
    });
    let mut out = vec![PartitionChain::empty(n)];
    out.extend(per_start.into_iter().flatten());
    Ok(out)
}
