//! Chart coordinates on the space of multiscaled lines.
//!
//! A point of the chart attached to a dual level tree `Γ` is stored as one
//! rational `z_ij` per pair `i < j` together with the level parameters
//! `t_1..t_ℓ`. The pair `(i_m, j_m)` chosen on each non-terminal level `m`
//! normalizes that level: `z_{i_m j_m} = 1`.
//!
//! Periods are `Π_ij = z_ij / (t_{m+1}⋯t_ℓ)` where `m` is the level of the
//! meet of `i` and `j`. Additivity of periods, cleared of denominators, gives
//! the relation checked on every triple: with `a, b, c` the meet levels of
//! `ij, jk, ik` and `μ` their minimum,
//!
//! `z_ik·τ(μ,c) = z_ij·τ(μ,a) + z_jk·τ(μ,b)`, where `τ(p,q) = t_{p+1}⋯t_q`.
//!
//! When all `t` vanish this is plain additivity at a vertex plus the node
//! coincidence `z_ik = z_ij` for triples branching above the meet.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::leveltrees::{
    apply_permutation, contract_levels, contraction_levels, level_map, tree_to_chain,
    DualLevelTree, RootedTree,
};
use crate::partitions::{Partition, PartitionChain};
use crate::perm::Permutation;
use crate::rational::{format_q, ExtendedValue, Q};

/// One normalizing pair per non-terminal level, indexed by level.
pub type IndexChoice = Vec<(usize, usize)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChartPoint {
    tree: DualLevelTree,
    indices: IndexChoice,
    z: BTreeMap<(usize, usize), Q>,
    t: Vec<Q>,
}

/// The first constraint a chart point fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Wrong number of indices or `t` values, or missing/extra `z` keys.
    Shape(String),
    /// The pair chosen for `level` meets on `actual` instead.
    IndexLevel {
        level: usize,
        pair: (usize, usize),
        actual: usize,
    },
    /// `z` of the normalizing pair on `level` is not 1.
    Normalization {
        level: usize,
        pair: (usize, usize),
        value: Q,
    },
    /// `z_ij = 0` although `i` and `j` sit on different vertices.
    Vanishing { i: usize, j: usize },
    /// The period relation fails on the triple `(i, j, k)`.
    Cocycle { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(msg) => write!(f, "shape: {msg}"),
            Violation::IndexLevel { level, pair, actual } => write!(
                f,
                "index pair ({},{}) for level {level} meets on level {actual}",
                pair.0, pair.1
            ),
            Violation::Normalization { level, pair, value } => write!(
                f,
                "normalization at level {level}: z_{},{} = {} instead of 1",
                pair.0,
                pair.1,
                format_q(value)
            ),
            Violation::Vanishing { i, j } => {
                write!(f, "nonvanishing: z_{i},{j} = 0 but {i} and {j} lie on different vertices")
            }
            Violation::Cocycle { i, j, k } => {
                write!(f, "cocycle relation fails on marks ({i},{j},{k})")
            }
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::invalid("chart point", v.to_string())
    }
}

/// For each level `m < ℓ`, the lexicographically least pair `i < j` meeting on `m`.
pub fn default_indices(tree: &DualLevelTree) -> IndexChoice {
    let n = tree.n();
    (0..tree.ell())
        .map(|m| {
            (1..=n)
                .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                .find(|&(i, j)| tree.meet_level(i, j) == m)
                .expect("every level below the top is a meet level")
        })
        .collect()
}

fn check_indices(tree: &DualLevelTree, indices: &[(usize, usize)]) -> std::result::Result<(), Violation> {
    if indices.len() != tree.ell() {
        return Err(Violation::Shape(format!(
            "{} index pairs for a tree with {} non-terminal levels",
            indices.len(),
            tree.ell()
        )));
    }
    for (m, &(i, j)) in indices.iter().enumerate() {
        let n = tree.n();
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Violation::Shape(format!("bad index pair ({i},{j}) on level {m}")));
        }
        let actual = tree.meet_level(i, j);
        if actual != m {
            return Err(Violation::IndexLevel {
                level: m,
                pair: (i, j),
                actual,
            });
        }
    }
    Ok(())
}

/// Validates an index choice for `tree`.
pub fn validate_indices(tree: &DualLevelTree, indices: &[(usize, usize)]) -> Result<()> {
    check_indices(tree, indices).map_err(Error::from)
}

impl ChartPoint {
    /// Builds and validates a point.
    pub fn new(
        tree: DualLevelTree,
        indices: IndexChoice,
        z: BTreeMap<(usize, usize), Q>,
        t: Vec<Q>,
    ) -> Result<Self> {
        let p = Self::unchecked(tree, indices, z, t);
        p.validate()?;
        Ok(p)
    }

    /// Builds a point without checks; use [`ChartPoint::validate`] before
    /// passing it to any other operation.
    pub fn unchecked(
        tree: DualLevelTree,
        indices: IndexChoice,
        z: BTreeMap<(usize, usize), Q>,
        t: Vec<Q>,
    ) -> Self {
        ChartPoint { tree, indices, z, t }
    }

    /// The point of the open chart with positions `z_1..z_n`.
    pub fn from_configuration(positions: &[Q]) -> Self {
        let n = positions.len();
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                z.insert((i, j), &positions[j - 1] - &positions[i - 1]);
            }
        }
        ChartPoint {
            tree: DualLevelTree::single_vertex(n),
            indices: Vec::new(),
            z,
            t: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn tree(&self) -> &DualLevelTree {
        &self.tree
    }

    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }

    pub fn z_map(&self) -> &BTreeMap<(usize, usize), Q> {
        &self.z
    }

    pub fn t_values(&self) -> &[Q] {
        &self.t
    }

    /// `t_m` for `1 ≤ m ≤ ℓ`.
    pub fn t(&self, m: usize) -> &Q {
        &self.t[m - 1]
    }

    /// `z_ij` extended antisymmetrically, with `z_ii = 0`.
    pub fn z(&self, i: usize, j: usize) -> Q {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.z[&(i, j)].clone(),
            Greater => -self.z[&(j, i)].clone(),
            Equal => Q::zero(),
        }
    }

    /// `τ(p, q) = t_{p+1}⋯t_q`, empty products being 1.
    pub fn tau(&self, p: usize, q: usize) -> Q {
        (p + 1..=q).fold(Q::one(), |acc, r| acc * self.t(r))
    }

    fn set_z(&mut self, i: usize, j: usize, v: Q) {
        if i < j {
            self.z.insert((i, j), v);
        } else {
            self.z.insert((j, i), -v);
        }
    }

    /// Checks every defining condition, reporting the first failure.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.tree.n();
        let ell = self.tree.ell();
        check_indices(&self.tree, &self.indices)?;
        if self.t.len() != ell {
            return Err(Violation::Shape(format!(
                "{} t values for a tree with {ell} levels above the root",
                self.t.len()
            )));
        }
        let expected = n * (n - 1) / 2;
        let in_range = self.z.keys().all(|&(i, j)| 1 <= i && i < j && j <= n);
        if self.z.len() != expected || !in_range {
            return Err(Violation::Shape(format!(
                "z must have exactly one entry per pair i<j of 1..{n}"
            )));
        }
        for (m, &(i, j)) in self.indices.iter().enumerate() {
            let value = self.z(i, j);
            if !value.is_one() {
                return Err(Violation::Normalization {
                    level: m,
                    pair: (i, j),
                    value,
                });
            }
        }
        for (&(i, j), v) in &self.z {
            if v.is_zero() && self.tree.terminal_of(i) != self.tree.terminal_of(j) {
                return Err(Violation::Vanishing { i, j });
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    let (a, b, c) = (
                        self.tree.meet_level(i, j),
                        self.tree.meet_level(j, k),
                        self.tree.meet_level(i, k),
                    );
                    let mu = a.min(b).min(c);
                    let lhs = self.z(i, k) * self.tau(mu, c);
                    let rhs = self.z(i, j) * self.tau(mu, a) + self.z(j, k) * self.tau(mu, b);
                    if lhs != rhs {
                        return Err(Violation::Cocycle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Rescales to a different choice of normalizing pairs. Pairs meeting on a
    /// changed level `m` are divided by `c = z_kl` of the new pair, and
    /// `t_m ↦ t_m·c`, `t_{m+1} ↦ t_{m+1}/c`.
    pub fn change_indices(&self, new: &[(usize, usize)]) -> Result<ChartPoint> {
        validate_indices(&self.tree, new)?;
        let mut out = self.clone();
        let n = self.n();
        for (m, &(k, l)) in new.iter().enumerate() {
            if self.indices[m] == (k, l) {
                continue;
            }
            let c = self.z(k, l);
            if c.is_zero() {
                return Err(Error::domain(format!(
                    "cannot normalize level {m} by z_{k},{l} = 0"
                )));
            }
            for i in 1..=n {
                for j in i + 1..=n {
                    if self.tree.meet_level(i, j) == m {
                        out.z.insert((i, j), self.z(i, j) / &c);
                    }
                }
            }
            if m >= 1 {
                out.t[m - 1] = &out.t[m - 1] * &c;
            }
            out.t[m] = &out.t[m] / &c;
        }
        out.indices = new.to_vec();
        Ok(out)
    }

    /// The period `Π_ij` on the projective line.
    pub fn period(&self, i: usize, j: usize) -> Result<ExtendedValue> {
        let (_, m) = self.tree.meet_vertex(i, j)?;
        let z = self.z(i, j);
        let ell = self.tree.ell();
        if m == ell {
            return Ok(ExtendedValue::Finite(z));
        }
        ExtendedValue::ratio(&z, &self.tau(m, ell))
    }

    /// Coordinates of the same point in the chart of a contraction `target`
    /// of this point's tree. Every contracted `t` must be nonzero.
    pub fn transition(&self, target: &DualLevelTree) -> Result<ChartPoint> {
        let levels = contraction_levels(&self.tree, target)?;
        if let Some(&k) = levels.iter().find(|&&k| self.t(k).is_zero()) {
            return Err(Error::OutsideOverlap(format!(
                "t_{k} = 0 on a contracted level"
            )));
        }
        let ell = self.tree.ell();
        let alpha = level_map(ell, &levels);
        let contracted = |k: usize| levels.contains(&k);
        // Top of the contracted run directly above each level.
        let run_top: Vec<usize> = (0..=ell)
            .map(|m| {
                let mut top = m;
                while top < ell && contracted(top + 1) {
                    top += 1;
                }
                top
            })
            .collect();
        let n = self.n();
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let m = self.tree.meet_level(i, j);
                z.insert((i, j), self.z(i, j) / self.tau(m, run_top[m]));
            }
        }
        let new_ell = target.ell();
        let t = (1..=new_ell)
            .map(|j| {
                (1..=ell)
                    .filter(|&k| alpha[k] == j)
                    .fold(Q::one(), |acc, k| acc * self.t(k))
            })
            .collect();
        let indices = (0..new_ell)
            .map(|m| {
                let top = (0..=ell).filter(|&k| alpha[k] == m).max().expect("α is onto");
                self.indices[top]
            })
            .collect();
        Ok(ChartPoint {
            tree: target.clone(),
            indices,
            z,
            t,
        })
    }

    /// Inverse of [`ChartPoint::transition`]: expresses this point in the
    /// chart of a tree `finer` that contracts onto this point's tree, with
    /// normalizing pairs `finer_indices`.
    pub fn refine(&self, finer: &DualLevelTree, finer_indices: &[(usize, usize)]) -> Result<ChartPoint> {
        validate_indices(finer, finer_indices)?;
        let levels = contraction_levels(finer, &self.tree)?;
        let ell = finer.ell();
        let alpha = level_map(ell, &levels);
        let induced: IndexChoice = (0..self.tree.ell())
            .map(|m| finer_indices[(0..=ell).filter(|&k| alpha[k] == m).max().expect("α is onto")])
            .collect();
        let coarse = self.change_indices(&induced)?;
        let contracted = |k: usize| levels.contains(&k);
        let mut t = vec![Q::zero(); ell];
        for a in (0..=ell).filter(|&a| !contracted(a)) {
            let mut top = a;
            while top < ell && contracted(top + 1) {
                top += 1;
            }
            // Z_r is the coarse coordinate of the pair normalizing fine level r.
            let big_z: Vec<Q> = (a..=top)
                .map(|r| {
                    let (i, j) = finer_indices.get(r).copied().unwrap_or((0, 0));
                    if r == top || i == 0 {
                        Q::one()
                    } else {
                        coarse.z(i, j)
                    }
                })
                .collect();
            if big_z.iter().any(Q::is_zero) {
                return Err(Error::OutsideOverlap(
                    "point is not in the chart of the finer tree".into(),
                ));
            }
            for r in a..top {
                t[r] = &big_z[r + 1 - a] / &big_z[r - a];
            }
            if a >= 1 {
                t[a - 1] = coarse.t(alpha[a]) * &big_z[0];
            }
        }
        let mut z = BTreeMap::new();
        let n = self.n();
        for i in 1..=n {
            for j in i + 1..=n {
                let m = finer.meet_level(i, j);
                let mut top = m;
                while top < ell && contracted(top + 1) {
                    top += 1;
                }
                let factor = (m + 1..=top).fold(Q::one(), |acc, r| acc * &t[r - 1]);
                z.insert((i, j), coarse.z(i, j) * factor);
            }
        }
        let fine = ChartPoint {
            tree: finer.clone(),
            indices: finer_indices.to_vec(),
            z,
            t,
        };
        fine.validate()
            .map_err(|v| Error::OutsideOverlap(format!("point is not in the chart of the finer tree ({v})")))?;
        Ok(fine)
    }

    /// The levels whose parameter is nonzero; contracting them gives the
    /// tree of the point's own stratum.
    fn nonzero_levels(&self) -> Vec<usize> {
        (1..=self.tree.ell()).filter(|&m| !self.t(m).is_zero()).collect()
    }

    /// The dual level tree of the stratum containing this point.
    pub fn stratum_tree(&self) -> DualLevelTree {
        contract_levels(&self.tree, &self.nonzero_levels()).expect("levels are in range")
    }

    /// The chain indexing the stratum containing this point.
    pub fn stratum_of(&self) -> PartitionChain {
        tree_to_chain(&self.stratum_tree())
    }

    /// The same point in the chart of its own stratum, where every `t` is 0.
    pub fn to_stratum_chart(&self) -> ChartPoint {
        self.transition(&self.stratum_tree())
            .expect("only nonzero levels are contracted")
    }

    /// A normal form: the stratum chart with default normalizing pairs. Two
    /// chart points describe the same point of the space iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> ChartPoint {
        let s = self.to_stratum_chart();
        let d = default_indices(&s.tree);
        s.change_indices(&d).expect("separated pairs have nonzero z")
    }

    /// Translates the marked points by `a`.
    ///
    /// In the chart of its own stratum the translation only moves marks on a
    /// common terminal vertex: `z_ij ↦ z_ij + a_j − a_i` for those pairs. The
    /// result is then expressed in this point's chart when it still lies
    /// there, and otherwise left in the stratum chart.
    pub fn g_act(&self, a: &[Q]) -> Result<ChartPoint> {
        let n = self.n();
        if a.len() != n {
            return Err(Error::domain(format!(
                "translation has {} entries for {n} marks",
                a.len()
            )));
        }
        let mut s = self.to_stratum_chart();
        for i in 1..=n {
            for j in i + 1..=n {
                if s.tree.terminal_of(i) == s.tree.terminal_of(j) {
                    let v = s.z(i, j) + &a[j - 1] - &a[i - 1];
                    s.set_z(i, j, v);
                }
            }
        }
        if s.tree == self.tree {
            return Ok(s);
        }
        Ok(s.refine(&self.tree, &self.indices).unwrap_or(s))
    }

    /// Relabels the marks: `z′_ij = z_{σ⁻¹(i)σ⁻¹(j)}`.
    pub fn s_act(&self, sigma: &Permutation) -> Result<ChartPoint> {
        let tree = apply_permutation(sigma, &self.tree)?;
        let inv = sigma.inverse();
        let n = self.n();
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                z.insert((i, j), self.z(inv.apply(i), inv.apply(j)));
            }
        }
        let indices = self
            .indices
            .iter()
            .map(|&(i, j)| (sigma.apply(i), sigma.apply(j)))
            .collect();
        Ok(ChartPoint {
            tree,
            indices,
            z,
            t: self.t.clone(),
        })
    }

    /// Marks `i ∼ j` exactly when the period `Π_ij` vanishes.
    pub fn collision_partition(&self) -> Partition {
        let n = self.n();
        let labels: Vec<usize> = (1..=n)
            .map(|i| {
                (1..=i)
                    .find(|&j| {
                        self.tree.terminal_of(i) == self.tree.terminal_of(j)
                            && self.z(j, i).is_zero()
                    })
                    .expect("j = i qualifies")
            })
            .collect();
        Partition::from_labels(&labels)
    }

    /// Whether all marks collided under `rho` have vanishing period.
    pub fn in_collision_stratum(&self, rho: &Partition) -> Result<bool> {
        rho.same_n_as(self.n())?;
        Ok(self.collision_partition().leq_unchecked(rho))
    }

    /// Forgets all but the minimal mark of each block of `rho`, relabelling
    /// blocks `1..|B(ρ)|` in block order.
    pub fn kappa(&self, rho: &Partition) -> Result<ChartPoint> {
        if !self.in_collision_stratum(rho)? {
            return Err(Error::domain(format!(
                "point does not lie in the collision stratum of {rho} (its collisions are {})",
                self.collision_partition()
            )));
        }
        let minima = rho.minima();
        let k = minima.len();
        let nodes = self
            .tree
            .vertices()
            .iter()
            .map(|v| {
                let mut kept: Vec<usize> = v
                    .marks
                    .iter()
                    .filter(|&&m| rho.block_of(m)[0] == m)
                    .map(|&m| rho.block_index(m) + 1)
                    .collect();
                kept.sort_unstable();
                (kept, v.level)
            })
            .collect();
        let tree = DualLevelTree::from_nodes(k, nodes)?;
        let mut z = BTreeMap::new();
        for a in 1..=k {
            for b in a + 1..=k {
                z.insert((a, b), self.z(minima[a - 1], minima[b - 1]));
            }
        }
        let indices = self
            .indices
            .iter()
            .map(|&(i, j)| (rho.block_index(i) + 1, rho.block_index(j) + 1))
            .collect();
        Ok(ChartPoint {
            tree,
            indices,
            z,
            t: self.t.clone(),
        })
    }

    /// Inverse of [`ChartPoint::kappa`]: `self` is a point with one mark per
    /// block of `rho`; every mark of a block is placed on its block's mark.
    pub fn lambda(&self, rho: &Partition) -> Result<ChartPoint> {
        if self.n() != rho.num_blocks() {
            return Err(Error::domain(format!(
                "point has {} marks but {rho} has {} blocks",
                self.n(),
                rho.num_blocks()
            )));
        }
        let n = rho.n();
        let nodes = self
            .tree
            .vertices()
            .iter()
            .map(|v| {
                let marks = v
                    .marks
                    .iter()
                    .flat_map(|&b| rho.blocks()[b - 1].iter().copied())
                    .collect();
                (marks, v.level)
            })
            .collect();
        let tree = DualLevelTree::from_nodes(n, nodes)?;
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let (a, b) = (rho.block_index(i) + 1, rho.block_index(j) + 1);
                z.insert((i, j), self.z(a, b));
            }
        }
        let minima = rho.minima();
        let indices = self
            .indices
            .iter()
            .map(|&(a, b)| (minima[a - 1], minima[b - 1]))
            .collect();
        Ok(ChartPoint {
            tree,
            indices,
            z,
            t: self.t.clone(),
        })
    }

    /// Forgets levels and non-terminal scales: the shape of the stratum tree
    /// together with the periods of marks sharing a terminal vertex.
    pub fn xi(&self) -> ScaledCurveData {
        let s = self.to_stratum_chart();
        let n = self.n();
        let mut periods = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if s.tree.terminal_of(i) == s.tree.terminal_of(j) {
                    periods.insert((i, j), s.z(i, j));
                }
            }
        }
        ScaledCurveData {
            tree: s.tree.shape(),
            periods,
        }
    }
}

/// Output of forgetting the level structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledCurveData {
    pub tree: RootedTree,
    /// Periods of pairs on a common terminal vertex.
    pub periods: BTreeMap<(usize, usize), Q>,
}

impl Partition {
    fn same_n_as(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::domain(format!(
                "partition of {} marks used with a point of {n} marks",
                self.n()
            )));
        }
        Ok(())
    }
}
