//! Partition lattice laws and the tree/chain correspondence, checked against
//! brute-force constructions that never go through chains.

use std::collections::BTreeSet;

use multiscale::leveltrees::{
    apply_permutation, chain_to_tree, combine_contractions, contract_levels, contraction_levels,
    enumerate_level_structures, enumerate_trees, tree_to_chain, DualLevelTree,
};
use multiscale::partitions::{enumerate_chains, enumerate_partitions, Partition, PartitionChain};
use multiscale::perm::Permutation;
use proptest::prelude::*;

/// `ρ ≤ π` straight from the definition: every block of `π` sits inside a
/// block of `ρ`.
fn refines(rho: &Partition, pi: &Partition) -> bool {
    pi.blocks()
        .iter()
        .all(|b| rho.blocks().iter().any(|c| b.iter().all(|x| c.contains(x))))
}

fn bell(n: usize) -> usize {
    // Bell triangle.
    let mut row = vec![1usize];
    for _ in 1..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    *row.last().unwrap()
}

/// Every subset of `0..k` in bitmask order.
fn subsets_of(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|m| (0..items.len()).filter(|b| m & (1 << b) != 0).map(|b| items[b]).collect())
        .collect()
}

/// All set partitions of `items` into at least two blocks.
fn splittings(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn rec(rest: &[usize], acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some((&x, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for b in 0..acc.len() {
            acc[b].push(x);
            rec(tail, acc, out);
            acc[b].pop();
        }
        acc.push(vec![x]);
        rec(tail, acc, out);
        acc.pop();
    }
    let mut out = Vec::new();
    rec(items, &mut Vec::new(), &mut out);
    out.retain(|p| p.len() >= 2);
    out
}

/// Every leveled tree with top level `ell` over `marks`, rooted at `level`,
/// as lists of `(marks, level)` nodes.
fn grow(marks: &[usize], level: usize, ell: usize) -> Vec<Vec<(Vec<usize>, usize)>> {
    let me = (marks.to_vec(), level);
    if level == ell {
        return vec![vec![me]];
    }
    let mut out = Vec::new();
    for split in splittings(marks) {
        // Each child is either a terminal on the top level or an inner vertex
        // strictly between; collect the product of the choices.
        let mut partial: Vec<Vec<(Vec<usize>, usize)>> = vec![vec![me.clone()]];
        for block in &split {
            let mut options = Vec::new();
            for l in level + 1..=ell {
                options.extend(grow(block, l, ell).into_iter().filter(|t| t.len() > 1 || l == ell));
            }
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    options.iter().map(move |o| {
                        let mut q = p.clone();
                        q.extend(o.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Dual level trees built vertex by vertex, keeping only surjective levels.
fn brute_force_trees(n: usize) -> BTreeSet<DualLevelTree> {
    let marks: Vec<usize> = (1..=n).collect();
    let mut out = BTreeSet::new();
    out.insert(DualLevelTree::from_nodes(n, vec![(marks.clone(), 0)]).unwrap());
    for ell in 1..n {
        for nodes in grow(&marks, 0, ell) {
            let used: BTreeSet<usize> = nodes.iter().map(|(_, l)| *l).collect();
            if used.len() == ell + 1 {
                out.insert(DualLevelTree::from_nodes(n, nodes).unwrap());
            }
        }
    }
    out
}

#[test]
fn partition_counts_are_bell_numbers() {
    for n in 1..=7 {
        assert_eq!(enumerate_partitions(n).unwrap().len(), bell(n), "n = {n}");
    }
}

#[test]
fn lattice_operations_are_glb_and_lub() {
    for n in 1..=4 {
        let parts = enumerate_partitions(n).unwrap();
        for a in &parts {
            for b in &parts {
                assert_eq!(a.leq(b).unwrap(), refines(a, b));
                let m = a.meet(b).unwrap();
                let j = a.join(b).unwrap();
                assert!(refines(&m, a) && refines(&m, b));
                assert!(refines(a, &j) && refines(b, &j));
                for c in &parts {
                    if refines(c, a) && refines(c, b) {
                        assert!(refines(c, &m), "{c} below {a}, {b} but not below {m}");
                    }
                    if refines(a, c) && refines(b, c) {
                        assert!(refines(&j, c));
                    }
                }
            }
        }
    }
}

#[test]
fn trees_match_direct_construction() {
    for n in 1..=5 {
        let direct = brute_force_trees(n);
        let from_chains: BTreeSet<DualLevelTree> = enumerate_trees(n).unwrap().into_iter().collect();
        assert_eq!(from_chains, direct, "n = {n}");
    }
    assert_eq!(enumerate_trees(2).unwrap().len(), 2);
    assert_eq!(enumerate_trees(3).unwrap().len(), 8);
}

#[test]
fn tree_chain_round_trips() {
    for n in 1..=6 {
        let chains = enumerate_chains(n, None).unwrap();
        let trees: BTreeSet<DualLevelTree> = chains.iter().map(chain_to_tree).collect();
        assert_eq!(trees.len(), chains.len());
        for c in &chains {
            let t = chain_to_tree(c);
            assert_eq!(&tree_to_chain(&t), c);
            assert_eq!(chain_to_tree(&tree_to_chain(&t)), t);
        }
    }
}

#[test]
fn contraction_is_chain_deletion_and_composes() {
    for n in 2..=5 {
        for tree in enumerate_trees(n).unwrap() {
            let ell = tree.ell();
            let levels: Vec<usize> = (1..=ell).collect();
            for s in subsets_of(&levels) {
                let once = contract_levels(&tree, &s).unwrap();
                assert_eq!(tree_to_chain(&once), tree_to_chain(&tree).without(&s));
                assert_eq!(contraction_levels(&tree, &once).unwrap(), s);
                let rest: Vec<usize> = (1..=once.ell()).collect();
                for s2 in subsets_of(&rest) {
                    let twice = contract_levels(&once, &s2).unwrap();
                    let combined = combine_contractions(ell, &s, &s2);
                    assert_eq!(contract_levels(&tree, &combined).unwrap(), twice);
                }
            }
        }
    }
}

#[test]
fn permutations_preserve_shape_and_orbits_divide() {
    for n in 2..=4 {
        let perms = all_permutations(n);
        let trees = enumerate_trees(n).unwrap();
        for t in &trees {
            let orbit: BTreeSet<DualLevelTree> = perms.iter().map(|s| apply_permutation(s, t).unwrap()).collect();
            assert_eq!(perms.len() % orbit.len(), 0);
            for s in &perms {
                let u = apply_permutation(s, t).unwrap();
                assert_eq!(u.ell(), t.ell());
                let mut a: Vec<(usize, usize)> = t.vertices().iter().map(|v| (v.level, v.marks.len())).collect();
                let mut b: Vec<(usize, usize)> = u.vertices().iter().map(|v| (v.level, v.marks.len())).collect();
                a.sort();
                b.sort();
                assert_eq!(a, b);
                assert_eq!(tree_to_chain(&u).len(), tree_to_chain(t).len());
            }
        }
    }
}

#[test]
fn level_structures_keep_the_shape() {
    for n in 2..=5 {
        let trees = enumerate_trees(n).unwrap();
        let shapes: BTreeSet<_> = trees.iter().map(DualLevelTree::shape).collect();
        let mut total = 0;
        for shape in &shapes {
            let leveled = enumerate_level_structures(shape);
            assert!(leveled.iter().all(|t| &t.shape() == shape));
            total += leveled.len();
        }
        assert_eq!(total, trees.len());
    }
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (1..=n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if k <= 1 {
            out.push(Permutation::new(items.clone()).unwrap());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            let swap = if k % 2 == 0 { i } else { 0 };
            items.swap(swap, k - 1);
        }
    }
    heap(n, &mut items, &mut out);
    out
}

fn partition_strategy(n: usize) -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0..n, n).prop_map(|labels| Partition::from_labels(&labels))
}

proptest! {
    #[test]
    fn lattice_laws((n, a, b, c) in (1usize..8).prop_flat_map(|n| {
        (Just(n), partition_strategy(n), partition_strategy(n), partition_strategy(n))
    })) {
        prop_assert_eq!(a.meet(&b).unwrap(), b.meet(&a).unwrap());
        prop_assert_eq!(a.join(&b).unwrap(), b.join(&a).unwrap());
        prop_assert_eq!(a.meet(&b.meet(&c).unwrap()).unwrap(), a.meet(&b).unwrap().meet(&c).unwrap());
        prop_assert_eq!(a.join(&b.join(&c).unwrap()).unwrap(), a.join(&b).unwrap().join(&c).unwrap());
        prop_assert_eq!(a.meet(&a.join(&b).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(a.join(&a.meet(&b).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(a.leq(&b).unwrap(), a.meet(&b).unwrap() == a);
        prop_assert!(Partition::bottom(n).leq(&a).unwrap() && a.leq(&Partition::top(n)).unwrap());
        prop_assert_eq!(a.dim() + a.codim(), n as isize - 1);
    }

    #[test]
    fn chains_survive_label_round_trip(n in 2usize..6, pick in any::<prop::sample::Index>()) {
        let chains = enumerate_chains(n, None).unwrap();
        let c = &chains[pick.index(chains.len())];
        let rebuilt = PartitionChain::new(n, c.elements().to_vec()).unwrap();
        prop_assert_eq!(&rebuilt, c);
        for p in c.elements() {
            prop_assert_eq!(&Partition::new(n, p.blocks().to_vec()).unwrap(), p);
        }
    }
}

