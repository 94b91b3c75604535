//! Stratifications by level trees and by collisions, and the boundary of
//! the iterated blowup of the partition subspace arrangement.
//!
//! The arrangement side is computed with actual linear algebra: every
//! partition gives a subspace of `ℙ(V)`, `V = Q^n` with coordinates
//! `P_12, …, P_1n, t`, cut out by `t = 0` and `P_1j − P_1i = 0` for `i ∼ j`.
//! Inclusions, intersections and dimensions come from exact ranks, not from
//! the partition order, so comparing the two sides is a real check.

use std::collections::HashMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::limits::Limits;
use crate::partitions::{all_partitions, enumerate_chains_with, n_set, NEntry, Partition, PartitionChain};
use crate::rational::Q;

/// A stratum indexed by a chain: codimension is the chain length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StratumRecord {
    pub chain: PartitionChain,
    pub codim: usize,
    pub dim: usize,
}

/// All strata with their closure order, given by covering pairs
/// `(i, j)`: stratum `j` lies in the closure of stratum `i` and its chain
/// has exactly one more element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratificationPoset {
    pub n: usize,
    pub records: Vec<StratumRecord>,
    pub covers: Vec<(usize, usize)>,
}

pub fn build_stratification(n: usize) -> Result<StratificationPoset> {
    build_stratification_with(n, &Limits::from_env(), Exec::Sequential)
}

pub fn build_stratification_with(n: usize, limits: &Limits, exec: Exec) -> Result<StratificationPoset> {
    let chains = enumerate_chains_with(n, None, limits, exec)?;
    let index: HashMap<&PartitionChain, usize> = chains.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let per_chain = exec.map(&(0..chains.len()).collect::<Vec<_>>(), |&j| {
        let c = &chains[j];
        let mut parents: Vec<usize> = (1..=c.len()).map(|k| index[&c.without(&[k])]).collect();
        parents.sort_unstable();
        parents.into_iter().map(move |i| (i, j)).collect::<Vec<_>>()
    });
    let mut covers: Vec<(usize, usize)> = per_chain.into_iter().flatten().collect();
    covers.sort_unstable();
    let records = chains
        .into_iter()
        .map(|chain| {
            let codim = chain.len();
            StratumRecord {
                chain,
                codim,
                dim: n - 1 - codim,
            }
        })
        .collect();
    Ok(StratificationPoset { n, records, covers })
}

/// Whether the closure of the stratum of `rho` contains the stratum of `chi`:
/// `rho ⊆ chi` as sets of partitions.
pub fn closure_contains(rho: &PartitionChain, chi: &PartitionChain) -> Result<bool> {
    if rho.n() != chi.n() {
        return Err(Error::domain("chains of different marking sets"));
    }
    Ok(rho.elements().iter().all(|p| chi.elements().contains(p)))
}

/// Whether the boundary divisors indexed by `rhos` have a common point,
/// i.e. the partitions are pairwise comparable.
pub fn divisors_intersect(rhos: &[Partition]) -> Result<bool> {
    for (k, a) in rhos.iter().enumerate() {
        for b in &rhos[k + 1..] {
            if !a.comparable(b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Centers of the iterated blowup: stage `k` blows up every `π ≠ ⊥` with
/// `dim π = k`.
pub fn blowup_schedule(n: usize) -> Result<Vec<(usize, Vec<Partition>)>> {
    blowup_schedule_with(n, &Limits::from_env())
}

pub fn blowup_schedule_with(n: usize, limits: &Limits) -> Result<Vec<(usize, Vec<Partition>)>> {
    Limits::check("blowup schedule", n, limits.chains)?;
    let parts = all_partitions(n);
    Ok((0..n.saturating_sub(1))
        .map(|k| {
            let centers = parts.iter().filter(|p| p.dim() == k as isize).cloned().collect();
            (k, centers)
        })
        .collect())
}

/// Collision strata `T_ρ`, one per partition, with covering pairs `(i, j)`
/// meaning `T_i` lies in the closure of `T_j` (`ρ_i < ρ_j` with nothing between).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionPoset {
    pub n: usize,
    pub strata: Vec<Partition>,
    /// `|B(ρ)| − 1` for each stratum.
    pub dims: Vec<usize>,
    pub covers: Vec<(usize, usize)>,
}

pub fn collision_poset(n: usize) -> Result<CollisionPoset> {
    collision_poset_with(n, &Limits::from_env())
}

pub fn collision_poset_with(n: usize, limits: &Limits) -> Result<CollisionPoset> {
    Limits::check("collision poset", n, limits.chains)?;
    let strata = all_partitions(n);
    let dims = strata.iter().map(|p| p.num_blocks() - 1).collect();
    let mut covers = Vec::new();
    for (i, a) in strata.iter().enumerate() {
        for (j, b) in strata.iter().enumerate() {
            // A cover in the refinement order splits exactly one block.
            if b.num_blocks() == a.num_blocks() + 1 && a.leq_unchecked(b) {
                covers.push((i, j));
            }
        }
    }
    Ok(CollisionPoset { n, strata, dims, covers })
}

/// A linear subspace of `V = Q^dim`, stored as a reduced row-echelon basis of
/// the linear forms vanishing on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    equations: Vec<Vec<Q>>,
}

fn row_reduce(ambient: usize, mut rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let mut rank = 0;
    for col in 0..ambient {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Q::one() / &rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..ambient {
                    let d = &f * &rows[rank][c];
                    rows[r][c] -= d;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

impl Subspace {
    pub fn from_equations(ambient: usize, rows: Vec<Vec<Q>>) -> Self {
        Subspace {
            ambient,
            equations: row_reduce(ambient, rows),
        }
    }

    pub fn whole(ambient: usize) -> Self {
        Subspace {
            ambient,
            equations: Vec::new(),
        }
    }

    /// Projective dimension; `−1` for the empty set.
    pub fn projective_dim(&self) -> isize {
        (self.ambient - self.equations.len()) as isize - 1
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let rows = self.equations.iter().chain(&other.equations).cloned().collect();
        Subspace::from_equations(self.ambient, rows)
    }

    /// `self ⊆ other`: every equation of `other` follows from those of `self`.
    pub fn contained_in(&self, other: &Subspace) -> bool {
        self.intersect(other).equations.len() == self.equations.len()
    }
}

/// The partition subspace arrangement in `ℙ(V)`, `dim V = n`.
#[derive(Clone, Debug)]
pub struct Arrangement {
    n: usize,
}

impl Arrangement {
    pub fn new(n: usize) -> Self {
        Arrangement { n }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// The linear form `P_ij = P_1j − P_1i`.
    pub fn pair_form(&self, i: usize, j: usize) -> Vec<Q> {
        let mut row = vec![Q::zero(); self.n];
        if j > 1 {
            row[j - 2] += Q::one();
        }
        if i > 1 {
            row[i - 2] -= Q::one();
        }
        row
    }

    /// The linear form `t`.
    pub fn t_form(&self) -> Vec<Q> {
        let mut row = vec![Q::zero(); self.n];
        row[self.n - 1] = Q::one();
        row
    }

    pub fn form(&self, e: NEntry) -> Vec<Q> {
        match e {
            NEntry::Pair(i, j) => self.pair_form(i, j),
            NEntry::T => self.t_form(),
        }
    }

    /// `H_ρ = {t = 0, P_ij = 0 for i ∼ j}`.
    pub fn subspace(&self, rho: &Partition) -> Subspace {
        let mut rows = vec![self.t_form()];
        for b in rho.blocks() {
            for (k, &i) in b.iter().enumerate() {
                for &j in &b[k + 1..] {
                    rows.push(self.pair_form(i, j));
                }
            }
        }
        Subspace::from_equations(self.n, rows)
    }

    /// Cuts `H_π` (or all of `ℙ(V)` for `π = ⊤` with the `t` entry) down by
    /// the forms listed in `entries`.
    pub fn cut(&self, ambient: &Subspace, entries: &[NEntry]) -> Subspace {
        let rows = entries.iter().map(|&e| self.form(e)).collect();
        ambient.intersect(&Subspace::from_equations(self.n, rows))
    }
}

/// Boundary faces of the iterated blowup, generated stage by stage.
///
/// After the stage blowing up a center `C`, its exceptional divisor meets an
/// earlier face exactly when every earlier member lies inside `C`: blowing
/// up the intersection of two subspaces separates them unless one contains
/// the other. Containment is decided by ranks on the arrangement.
pub fn boundary_faces(n: usize) -> Result<Vec<Vec<Partition>>> {
    boundary_faces_with(n, &Limits::from_env())
}

pub fn boundary_faces_with(n: usize, limits: &Limits) -> Result<Vec<Vec<Partition>>> {
    let schedule = blowup_schedule_with(n, limits)?;
    let arr = Arrangement::new(n);
    let centers: Vec<Partition> = schedule.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
    let spaces: Vec<Subspace> = centers.iter().map(|c| arr.subspace(c)).collect();
    let inside: Vec<Vec<bool>> = spaces
        .iter()
        .map(|a| spaces.iter().map(|b| a.contained_in(b)).collect())
        .collect();
    // Faces as lists of center indices; centers are blown up in index order.
    let mut faces: Vec<Vec<usize>> = vec![Vec::new()];
    let mut offset = 0;
    for (_, stage) in &schedule {
        let mut added = Vec::new();
        for c in offset..offset + stage.len() {
            for f in &faces {
                if f.iter().all(|&a| inside[a][c]) {
                    let mut g = f.clone();
                    g.push(c);
                    added.push(g);
                }
            }
        }
        faces.extend(added);
        offset += stage.len();
    }
    Ok(faces
        .into_iter()
        .map(|f| f.into_iter().map(|k| centers[k].clone()).collect())
        .collect())
}

/// Checks that `N_{ρ|π}` cuts `H_ρ` out of `H_π` with exactly the right
/// number of equations, for one pair `ρ ≤ π`.
pub fn n_set_cuts_out(rho: &Partition, pi: &Partition) -> Result<bool> {
    let arr = Arrangement::new(rho.n());
    let entries = n_set(rho, pi, false)?;
    let h_pi = arr.subspace(pi);
    let h_rho = arr.subspace(rho);
    let codim = h_pi.projective_dim() - h_rho.projective_dim();
    Ok(arr.cut(&h_pi, &entries) == h_rho && entries.len() as isize == codim)
}
