//! Dual level trees and unleveled rooted marked trees.
//!
//! A vertex is identified by the set of marks above it: for a terminal vertex
//! these are the marks it carries, for an inner vertex the union over its
//! children. Non-terminal vertices branch at least twice, so these sets are
//! distinct and make tree equality structural. Long edges are ordinary edges
//! between non-adjacent levels.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::limits::Limits;
use crate::partitions::{enumerate_chains_with, join_marks, Partition, PartitionChain};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub marks: Vec<usize>,
    pub level: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A rooted, leveled, `n`-marked tree. Vertices are kept sorted by
/// `(level, marks)`, so the root is vertex `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualLevelTree {
    n: usize,
    ell: usize,
    vertices: Vec<Vertex>,
    /// `terminal[i - 1]` is the vertex carrying mark `i`.
    terminal: Vec<usize>,
}

/// Parent links of a laminar family given as sorted mark sets: the parent of
/// a set is the smallest strict superset. Requires exactly one set equal to
/// `{1..n}`, pairwise nested-or-disjoint sets, no repeats, and every mark in
/// some set.
fn laminar_parents(n: usize, sets: &[Vec<usize>]) -> Result<Vec<Option<usize>>> {
    let kind = "tree";
    let full: Vec<usize> = (1..=n).collect();
    let roots: Vec<usize> = (0..sets.len()).filter(|&v| sets[v] == full).collect();
    if roots.len() != 1 {
        return Err(Error::invalid(kind, "need exactly one vertex above all marks"));
    }
    let as_sets: Vec<BTreeSet<usize>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    for (v, s) in sets.iter().enumerate() {
        if s.is_empty() || s.iter().any(|&m| m == 0 || m > n) || as_sets[v].len() != s.len() {
            return Err(Error::invalid(kind, format!("bad mark set {s:?}")));
        }
    }
    let mut parents = vec![None; sets.len()];
    for v in 0..sets.len() {
        for u in 0..sets.len() {
            if u == v {
                continue;
            }
            let inter = as_sets[u].intersection(&as_sets[v]).count();
            if inter == 0 {
                continue;
            }
            if as_sets[u] == as_sets[v] {
                return Err(Error::invalid(
                    kind,
                    format!("two vertices carry the same marks {:?}", sets[v]),
                ));
            }
            if inter != as_sets[u].len().min(as_sets[v].len()) {
                return Err(Error::invalid(
                    kind,
                    format!("mark sets {:?} and {:?} overlap without nesting", sets[u], sets[v]),
                ));
            }
            if as_sets[u].len() > as_sets[v].len()
                && parents[v].is_none_or(|p: usize| sets[p].len() > sets[u].len())
            {
                parents[v] = Some(u);
            }
        }
    }
    Ok(parents)
}

/// Checks the branching and marking conditions shared by leveled and
/// unleveled trees: inner vertices have at least two children and their
/// mark set is the union of the children's.
fn check_branching(sets: &[Vec<usize>], children: &[Vec<usize>]) -> Result<()> {
    for (v, ch) in children.iter().enumerate() {
        if ch.is_empty() {
            continue;
        }
        if ch.len() < 2 {
            return Err(Error::invalid(
                "tree",
                format!("vertex {:?} has a single child", sets[v]),
            ));
        }
        let covered: usize = ch.iter().map(|&c| sets[c].len()).sum();
        if covered != sets[v].len() {
            return Err(Error::invalid(
                "tree",
                format!("vertex {:?} carries marks itself but is not terminal", sets[v]),
            ));
        }
    }
    Ok(())
}

pub(crate) fn marks_id(n: usize, marks: &[usize]) -> String {
    join_marks(marks, if n >= 10 { "." } else { "" })
}

impl DualLevelTree {
    /// Builds a tree from `(marks above vertex, level)` pairs, validating every
    /// invariant of a dual level tree.
    pub fn from_nodes(n: usize, mut nodes: Vec<(Vec<usize>, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tree", "n must be positive"));
        }
        for (m, _) in nodes.iter_mut() {
            m.sort_unstable();
        }
        nodes.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        let sets: Vec<Vec<usize>> = nodes.iter().map(|(m, _)| m.clone()).collect();
        let parents = laminar_parents(n, &sets)?;
        let mut children = vec![Vec::new(); nodes.len()];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        check_branching(&sets, &children)?;
        let ell = nodes.iter().map(|(_, l)| *l).max().unwrap_or(0);
        if nodes[0].1 != 0 || parents[0].is_some() {
            return Err(Error::invalid("tree", "the root must be the unique level-0 vertex"));
        }
        if nodes.iter().skip(1).any(|(_, l)| *l == 0) {
            return Err(Error::invalid("tree", "only the root may sit on level 0"));
        }
        let used: BTreeSet<usize> = nodes.iter().map(|(_, l)| *l).collect();
        if used.len() != ell + 1 {
            return Err(Error::invalid("tree", "levels are not surjective onto 0..=ell"));
        }
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                if nodes[*p].1 >= nodes[v].1 {
                    return Err(Error::invalid(
                        "tree",
                        format!("levels must increase away from the root at {:?}", sets[v]),
                    ));
                }
            }
            if children[v].is_empty() && nodes[v].1 != ell {
                return Err(Error::invalid(
                    "tree",
                    format!("terminal vertex {:?} is not on the top level", sets[v]),
                ));
            }
        }
        let mut terminal = vec![usize::MAX; n];
        for (v, ch) in children.iter().enumerate() {
            if ch.is_empty() {
                for &m in &sets[v] {
                    terminal[m - 1] = v;
                }
            }
        }
        let vertices = nodes
            .into_iter()
            .zip(parents)
            .zip(children)
            .map(|(((marks, level), parent), children)| Vertex {
                marks,
                level,
                parent,
                children,
            })
            .collect();
        Ok(DualLevelTree {
            n,
            ell,
            vertices,
            terminal,
        })
    }

    /// The single-vertex tree carrying every mark.
    pub fn single_vertex(n: usize) -> Self {
        DualLevelTree {
            n,
            ell: 0,
            vertices: vec![Vertex {
                marks: (1..=n).collect(),
                level: 0,
                parent: None,
                children: Vec::new(),
            }],
            terminal: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The top level `ℓ`.
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn level(&self, v: usize) -> usize {
        self.vertices[v].level
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.vertices[v].children.is_empty()
    }

    /// The vertex carrying mark `i`.
    pub fn terminal_of(&self, i: usize) -> usize {
        self.terminal[i - 1]
    }

    /// Canonical vertex name: its marks concatenated (dot-separated once
    /// `n ≥ 10`).
    pub fn vertex_id(&self, v: usize) -> String {
        marks_id(self.n, &self.vertices[v].marks)
    }

    pub fn find_vertex(&self, id: &str) -> Option<usize> {
        (0..self.vertices.len()).find(|&v| self.vertex_id(v) == id)
    }

    fn check_mark(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::domain(format!("mark {i} outside 1..{}", self.n)));
        }
        Ok(())
    }

    /// The meet `h(i) ∧ h(j)` and its level.
    pub fn meet_vertex(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        self.check_mark(i)?;
        self.check_mark(j)?;
        let v = self.meet_index(i, j);
        Ok((v, self.level(v)))
    }

    pub(crate) fn meet_index(&self, i: usize, j: usize) -> usize {
        let (mut a, mut b) = (self.terminal_of(i), self.terminal_of(j));
        // Parents always have a smaller index, so walking the larger index
        // up finds the common ancestor.
        while a != b {
            if a > b {
                a = self.vertices[a].parent.expect("root is an ancestor");
            } else {
                b = self.vertices[b].parent.expect("root is an ancestor");
            }
        }
        a
    }

    /// Level of `h(i) ∧ h(j)`; `ℓ` when both marks sit on the same vertex.
    pub fn meet_level(&self, i: usize, j: usize) -> usize {
        self.level(self.meet_index(i, j))
    }

    /// Path from `v` down to the root, starting with `v`.
    pub fn ancestors(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.vertices[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    /// The child of `v` on the way up to mark `i`, if `i` lies strictly above `v`.
    pub fn child_towards(&self, v: usize, i: usize) -> Option<usize> {
        self.vertices[v]
            .children
            .iter()
            .copied()
            .find(|&c| self.vertices[c].marks.binary_search(&i).is_ok())
    }

    /// The underlying rooted marked tree, levels forgotten.
    pub fn shape(&self) -> RootedTree {
        RootedTree::from_mark_sets(
            self.n,
            self.vertices.iter().map(|v| v.marks.clone()).collect(),
        )
        .expect("a dual level tree has a valid shape")
    }

    /// Edges as `(parent, child)` vertex indices, ordered by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.parent.map(|p| (p, v)))
            .collect()
    }
}

impl fmt::Display for DualLevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.vertices.len())
            .map(|v| {
                let x = &self.vertices[v];
                match x.parent {
                    Some(p) => format!("{}@{}<{}", self.vertex_id(v), x.level, self.vertex_id(p)),
                    None => format!("{}@0", self.vertex_id(v)),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The tree of a chain: level-`k` vertices are the blocks of `ρ_k` that split
/// in `ρ_{k+1}`, plus every block of `ρ_ℓ` as a terminal.
pub fn chain_to_tree(chain: &PartitionChain) -> DualLevelTree {
    let n = chain.n();
    let ell = chain.len();
    let mut nodes = Vec::new();
    for k in 0..=ell {
        let rho = chain.rho(k);
        if k == ell {
            nodes.extend(rho.blocks().iter().map(|b| (b.clone(), k)));
            continue;
        }
        let next = chain.rho(k + 1);
        for b in rho.blocks() {
            let l = next.block_index(b[0]);
            if b.iter().any(|&i| next.block_index(i) != l) {
                nodes.push((b.clone(), k));
            }
        }
    }
    DualLevelTree::from_nodes(n, nodes).expect("chains give valid trees")
}

/// The chain of a tree: `i ∼ j` in `ρ_k` iff their meet has level at least `k`.
pub fn tree_to_chain(tree: &DualLevelTree) -> PartitionChain {
    let n = tree.n;
    let rhos = (1..=tree.ell)
        .map(|k| {
            // Label each mark by its lowest ancestor of level ≥ k.
            let labels: Vec<usize> = (1..=n)
                .map(|i| {
                    let path = tree.ancestors(tree.terminal_of(i));
                    *path
                        .iter()
                        .rev()
                        .find(|&&v| tree.level(v) >= k)
                        .expect("terminals sit on the top level")
                })
                .collect();
            Partition::from_labels(&labels)
        })
        .collect();
    PartitionChain::new_unchecked(n, rhos)
}

pub fn meet_vertex(tree: &DualLevelTree, i: usize, j: usize) -> Result<(usize, usize)> {
    tree.meet_vertex(i, j)
}

fn check_levels(tree: &DualLevelTree, levels: &[usize]) -> Result<()> {
    for &k in levels {
        if k == 0 {
            return Err(Error::domain("level 0 cannot be contracted"));
        }
        if k > tree.ell {
            return Err(Error::domain(format!(
                "level {k} does not exist; the tree has levels 0..={}",
                tree.ell
            )));
        }
    }
    Ok(())
}

/// The surviving level of each old level after contracting `levels`:
/// `α(k) = k − #{s ∈ levels : s ≤ k}`.
pub fn level_map(ell: usize, levels: &[usize]) -> Vec<usize> {
    (0..=ell)
        .map(|k| k - levels.iter().filter(|&&s| s <= k).count())
        .collect()
}

/// Contracts the edges between each level in `levels` and the level below it.
///
/// Works on the tree directly: vertices whose new levels agree and that are
/// joined by an edge collapse into one vertex, named after the lowest member.
/// So a vertex survives exactly when its parent lands on a different level.
pub fn contract_levels(tree: &DualLevelTree, levels: &[usize]) -> Result<DualLevelTree> {
    check_levels(tree, levels)?;
    let alpha = level_map(tree.ell, levels);
    let new_level = |v: usize| alpha[tree.level(v)];
    let nodes = (0..tree.vertices.len())
        .filter(|&v| match tree.vertices[v].parent {
            Some(p) => new_level(p) != new_level(v),
            None => true,
        })
        .map(|v| (tree.vertices[v].marks.clone(), new_level(v)))
        .collect();
    DualLevelTree::from_nodes(tree.n, nodes)
}

/// Turns a contraction `T` of an already contracted tree (indexed by the
/// contracted tree's levels) into the equivalent set of original levels.
pub fn combine_contractions(ell: usize, first: &[usize], second: &[usize]) -> Vec<usize> {
    let alpha = level_map(ell, first);
    let mut out: Vec<usize> = (1..=ell)
        .filter(|k| first.contains(k) || second.contains(&alpha[*k]))
        .collect();
    out.dedup();
    out
}

/// The level set whose contraction turns `tree` into `target`, if any.
pub fn contraction_levels(tree: &DualLevelTree, target: &DualLevelTree) -> Result<Vec<usize>> {
    if tree.n != target.n {
        return Err(Error::domain("trees have different marking sets"));
    }
    let full = tree_to_chain(tree);
    let sub = tree_to_chain(target);
    let mut levels = Vec::new();
    let mut it = sub.elements().iter().peekable();
    for (k, rho) in full.elements().iter().enumerate() {
        if it.peek() == Some(&rho) {
            it.next();
        } else {
            levels.push(k + 1);
        }
    }
    if it.next().is_some() {
        return Err(Error::domain(format!(
            "the target tree is not a contraction of the source ({} is not a subchain of {})",
            sub, full
        )));
    }
    Ok(levels)
}

/// Relabels marks: the vertex that carried `σ⁻¹(i)` now carries `i`.
pub fn apply_permutation(sigma: &Permutation, tree: &DualLevelTree) -> Result<DualLevelTree> {
    if sigma.n() != tree.n {
        return Err(Error::domain("permutation and tree sizes differ"));
    }
    let nodes = tree
        .vertices
        .iter()
        .map(|v| (v.marks.iter().map(|&m| sigma.apply(m)).collect(), v.level))
        .collect();
    DualLevelTree::from_nodes(tree.n, nodes)
}

/// All dual level trees with `n` marks, in chain order.
pub fn enumerate_trees(n: usize) -> Result<Vec<DualLevelTree>> {
    enumerate_trees_with(n, &Limits::from_env(), Exec::Sequential)
}

pub fn enumerate_trees_with(n: usize, limits: &Limits, exec: Exec) -> Result<Vec<DualLevelTree>> {
    let chains = enumerate_chains_with(n, None, limits, exec)?;
    Ok(exec.map(&chains, chain_to_tree))
}

/// A rooted marked tree without levels: marks sit on the leaves and every
/// inner vertex has at least two children. Vertices are stored as the
/// laminar family of their mark sets, largest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    n: usize,
    sets: Vec<Vec<usize>>,
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn from_mark_sets(n: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tree", "n must be positive"));
        }
        for s in sets.iter_mut() {
            s.sort_unstable();
        }
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let parents = laminar_parents(n, &sets)?;
        let mut children = vec![Vec::new(); sets.len()];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        check_branching(&sets, &children)?;
        Ok(RootedTree {
            n,
            sets,
            parents,
            children,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mark_sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn vertex_id(&self, v: usize) -> String {
        marks_id(self.n, &self.sets[v])
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The leaf carrying mark `i`.
    pub fn leaf_of(&self, i: usize) -> usize {
        (0..self.sets.len())
            .filter(|&v| self.is_leaf(v))
            .find(|&v| self.sets[v].contains(&i))
            .expect("leaves cover the marks")
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = (0..self.sets.len()).map(|v| self.vertex_id(v)).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Every way of putting levels on `shape` that yields a dual level tree.
///
/// The root gets level 0, leaves the top level `ℓ` and inner vertices a level
/// in `1..ℓ` exceeding their parent's; assignments missing a level are
/// discarded. Output is sorted.
pub fn enumerate_level_structures(shape: &RootedTree) -> Vec<DualLevelTree> {
    let inner: Vec<usize> = (1..shape.len()).filter(|&v| !shape.is_leaf(v)).collect();
    if shape.len() == 1 {
        return vec![DualLevelTree::single_vertex(shape.n)];
    }
    let mut out = Vec::new();
    for ell in 1..=inner.len() + 1 {
        let mut levels = vec![0usize; shape.len()];
        assign(shape, &inner, 0, ell, &mut levels, &mut out);
    }
    out.sort();
    out
}

fn assign(
    shape: &RootedTree,
    inner: &[usize],
    k: usize,
    ell: usize,
    levels: &mut Vec<usize>,
    out: &mut Vec<DualLevelTree>,
) {
    if k == inner.len() {
        let used: BTreeSet<usize> = inner.iter().map(|&v| levels[v]).collect();
        if used.len() + 1 != ell {
            return;
        }
        let nodes = (0..shape.len())
            .map(|v| {
                let l = if v == 0 {
                    0
                } else if shape.is_leaf(v) {
                    ell
                } else {
                    levels[v]
                };
                (shape.sets[v].clone(), l)
            })
            .collect();
        out.push(DualLevelTree::from_nodes(shape.n, nodes).expect("assignment respects the order"));
        return;
    }
    // Inner vertices are sorted largest first, so parents come first.
    let v = inner[k];
    let lo = levels[shape.parents[v].expect("inner non-root vertex")] + 1;
    for l in lo..ell {
        levels[v] = l;
        assign(shape, inner, k + 1, ell, levels, out);
    }
}
