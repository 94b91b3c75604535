//! The chain stratification against the face poset of the iterated blowup,
//! plus the arrangement facts the blowup bookkeeping relies on.

use std::collections::BTreeSet;

use multiscale::leveltrees::{enumerate_trees, tree_to_chain};
use multiscale::partitions::{enumerate_chains, enumerate_partitions, n_set, Partition, PartitionChain};
use multiscale::sampling::{random_point, PointOptions};
use multiscale::strata::{
    blowup_schedule, boundary_faces, build_stratification, closure_contains, collision_poset, divisors_intersect,
    n_set_cuts_out, Arrangement,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn as_set(ps: &[Partition]) -> BTreeSet<Partition> {
    ps.iter().cloned().collect()
}

fn proper(n: usize) -> Vec<Partition> {
    enumerate_partitions(n).unwrap().into_iter().filter(|p| !p.is_bottom()).collect()
}

fn totally_ordered(ps: &[Partition]) -> bool {
    ps.iter().all(|a| ps.iter().all(|b| a.leq(b).unwrap() || b.leq(a).unwrap()))
}

#[test]
fn chain_poset_is_isomorphic_to_blowup_faces() {
    for n in 2..=5 {
        let strata = build_stratification(n).unwrap();
        let faces = boundary_faces(n).unwrap();
        // The face named by the elements of each chain, and back.
        let chain_sets: Vec<BTreeSet<Partition>> = strata.records.iter().map(|r| as_set(r.chain.elements())).collect();
        let face_sets: BTreeSet<BTreeSet<Partition>> = faces.iter().map(|f| as_set(f)).collect();
        assert_eq!(face_sets.len(), faces.len(), "faces are distinct");
        assert_eq!(chain_sets.iter().cloned().collect::<BTreeSet<_>>(), face_sets, "n = {n}");
        // Covers of the stratification are exactly the one-element face
        // extensions on the blowup side.
        let mut face_covers = BTreeSet::new();
        for (a, fa) in chain_sets.iter().enumerate() {
            for (b, fb) in chain_sets.iter().enumerate() {
                if fb.len() == fa.len() + 1 && fa.is_subset(fb) {
                    face_covers.insert((a, b));
                }
            }
        }
        assert_eq!(strata.covers.iter().copied().collect::<BTreeSet<_>>(), face_covers);
        for r in &strata.records {
            assert_eq!(r.codim, r.chain.len());
            assert_eq!(r.dim, n - 1 - r.codim);
        }
        let codim_one = strata.records.iter().filter(|r| r.codim == 1).count();
        assert_eq!(codim_one, proper(n).len());
        assert!(strata.records.iter().any(|r| r.codim == n - 1));
    }
}

#[test]
fn divisors_meet_exactly_along_chains() {
    for n in 2..=4 {
        let ps = proper(n);
        let faces: BTreeSet<BTreeSet<Partition>> = boundary_faces(n).unwrap().iter().map(|f| as_set(f)).collect();
        for mask in 1u32..1 << ps.len().min(14) {
            if mask.count_ones() > 3 {
                continue;
            }
            let pick: Vec<Partition> = (0..ps.len()).filter(|b| mask & (1 << b) != 0).map(|b| ps[b].clone()).collect();
            let meets = divisors_intersect(&pick).unwrap();
            assert_eq!(meets, totally_ordered(&pick));
            assert_eq!(meets, faces.contains(&as_set(&pick)));
            if meets {
                for drop in 0..pick.len() {
                    let mut sub = pick.clone();
                    sub.remove(drop);
                    if !sub.is_empty() {
                        assert!(divisors_intersect(&sub).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn closure_is_chain_inclusion() {
    let chains = enumerate_chains(4, None).unwrap();
    for a in &chains {
        for b in &chains {
            let inclusion = as_set(a.elements()).is_subset(&as_set(b.elements()));
            assert_eq!(closure_contains(a, b).unwrap(), inclusion);
        }
    }
    assert!(closure_contains(&PartitionChain::empty(3), &PartitionChain::empty(4)).is_err());
}

#[test]
fn point_strata_sit_in_the_closure_of_deeper_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=5 {
        for tree in enumerate_trees(n).unwrap() {
            let chain = tree_to_chain(&tree);
            for _ in 0..3 {
                let p = random_point(&mut rng, &tree, PointOptions::default());
                let zero: Vec<usize> = (1..=tree.ell()).filter(|&m| num::Zero::is_zero(p.t(m))).collect();
                let nonzero: Vec<usize> = (1..=tree.ell()).filter(|m| !zero.contains(m)).collect();
                let s = p.stratum_of();
                assert_eq!(s, chain.without(&nonzero));
                // Zeroing any further coordinates keeps more of the chain.
                for mask in 0u32..1 << nonzero.len() {
                    let still: Vec<usize> =
                        (0..nonzero.len()).filter(|b| mask & (1 << b) == 0).map(|b| nonzero[b]).collect();
                    let deeper = chain.without(&still);
                    assert!(closure_contains(&s, &deeper).unwrap());
                }
            }
        }
    }
}

#[test]
fn schedule_partitions_the_proper_part_by_dimension() {
    for n in 2..=6 {
        let stages = blowup_schedule(n).unwrap();
        assert_eq!(stages.len(), n - 1);
        let mut seen = BTreeSet::new();
        for (k, centers) in &stages {
            for c in centers {
                assert_eq!(c.dim(), *k as isize);
                assert!(seen.insert(c.clone()), "{c} listed twice");
            }
        }
        assert_eq!(seen, as_set(&proper(n)));
    }
}

#[test]
fn collision_strata_follow_refinement() {
    let bell = [1, 1, 2, 5, 15, 52];
    for n in 1..=5 {
        let c = collision_poset(n).unwrap();
        assert_eq!(c.strata.len(), bell[n]);
        for &(a, b) in &c.covers {
            assert!(c.strata[a].lt(&c.strata[b]).unwrap());
            assert!(c.dims[a] < c.dims[b]);
        }
        assert_eq!(c.strata.iter().filter(|p| p.is_bottom()).count(), 1);
        assert_eq!(c.dims[0], 0);
    }
}

#[test]
fn arrangement_subspaces_form_the_lattice() {
    for n in 2..=5 {
        let arr = Arrangement::new(n);
        let ps = enumerate_partitions(n).unwrap();
        for a in &ps {
            let ha = arr.subspace(a);
            for b in &ps {
                let hb = arr.subspace(b);
                assert_eq!(ha.contained_in(&hb), a.leq(b).unwrap(), "{a} vs {b}");
                assert_eq!(ha.intersect(&hb), arr.subspace(&a.meet(b).unwrap()));
                if a.leq(b).unwrap() && !b.is_bottom() {
                    assert!(n_set_cuts_out(a, b).unwrap(), "{a} <= {b}");
                    let with_t = n_set(a, b, true).unwrap();
                    let plain = n_set(a, b, false).unwrap();
                    assert_eq!(with_t.len(), plain.len() + usize::from(b.is_top()));
                }
            }
        }
    }
}
