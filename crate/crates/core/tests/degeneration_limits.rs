//! Limits of Laurent families against a literal minimal-pair construction and
//! against the symbolic limits of the pairwise differences.

use std::collections::BTreeMap;

use multiscale::degeneration::{LaurentFamily, LaurentPolynomial, Valuation};
use multiscale::leveltrees::{apply_permutation, DualLevelTree};
use multiscale::rational::{q, qi, ExtendedValue, Q};
use multiscale::sampling::random_permutation;
use num::{BigInt, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The forest construction: start from the classes of bounded pairs, and
/// repeatedly join the components linked by the not-yet-joined pairs of
/// largest valuation into a new vertex one level further down.
fn minimal_pair_tree(f: &LaurentFamily) -> DualLevelTree {
    let n = f.n();
    let v = |i: usize, j: usize| f.difference(i, j).valuation();
    let mut comp: Vec<usize> = (0..n).collect();
    let relabel = |comp: &mut Vec<usize>, from: usize, to: usize| {
        for c in comp.iter_mut() {
            if *c == from {
                *c = to;
            }
        }
    };
    for i in 1..=n {
        for j in i + 1..=n {
            if v(i, j) >= Valuation::Finite(0) {
                let (a, b) = (comp[i - 1], comp[j - 1]);
                relabel(&mut comp, b, a);
            }
        }
    }
    let members = |comp: &[usize], c: usize| -> Vec<usize> { (1..=n).filter(|&i| comp[i - 1] == c).collect() };
    let mut rounds: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut terminals: Vec<Vec<usize>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for i in 1..=n {
        if seen.insert(comp[i - 1]) {
            terminals.push(members(&comp, comp[i - 1]));
        }
    }
    loop {
        let unmet: Vec<(usize, usize)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .filter(|&(i, j)| comp[i - 1] != comp[j - 1])
            .collect();
        let Some(best) = unmet.iter().map(|&(i, j)| v(i, j)).max() else {
            break;
        };
        let before = comp.clone();
        for &(i, j) in &unmet {
            if v(i, j) == best {
                let (a, b) = (comp[i - 1], comp[j - 1]);
                relabel(&mut comp, b, a);
            }
        }
        // New vertices: merged components that absorbed more than one old one.
        let mut round = Vec::new();
        let mut done = std::collections::BTreeSet::new();
        for i in 1..=n {
            let c = comp[i - 1];
            if done.insert(c) {
                let ms = members(&comp, c);
                let olds: std::collections::BTreeSet<usize> = ms.iter().map(|&m| before[m - 1]).collect();
                if olds.len() > 1 {
                    round.push(ms);
                }
            }
        }
        rounds.push(round);
    }
    let top = rounds.len();
    let mut nodes: Vec<(Vec<usize>, usize)> = terminals.into_iter().map(|t| (t, top)).collect();
    for (r, round) in rounds.into_iter().enumerate() {
        nodes.extend(round.into_iter().map(|m| (m, top - 1 - r)));
    }
    DualLevelTree::from_nodes(n, nodes).expect("the construction yields a dual level tree")
}

/// The limit on the projective line of `z_j(t) − z_i(t)` as `t → 0`.
fn symbolic_limit(f: &LaurentFamily, i: usize, j: usize) -> ExtendedValue {
    let d = f.difference(i, j);
    match d.valuation() {
        Valuation::Finite(e) if e < 0 => ExtendedValue::Infinity,
        _ => ExtendedValue::Finite(d.coefficient(0)),
    }
}

fn family(z: Vec<Vec<(i32, Q)>>) -> LaurentFamily {
    LaurentFamily::new(z.into_iter().map(LaurentPolynomial::new).collect()).unwrap()
}

fn rational() -> impl Strategy<Value = Q> {
    (-5i64..=5, 1i64..=3).prop_map(|(a, b)| Q::new(BigInt::from(a), BigInt::from(b)))
}

/// Families with exponents in `[-3, 3]`; some components copy earlier ones.
fn families(max_n: usize) -> impl Strategy<Value = LaurentFamily> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::collection::vec((-3i32..=3, rational()), 0..4), n),
                proptest::collection::vec(proptest::option::weighted(0.15, 0..n), n),
            )
        })
        .prop_map(|(mut z, copies)| {
            for (i, c) in copies.into_iter().enumerate() {
                if let Some(c) = c.filter(|&c| c < i) {
                    z[i] = z[c].clone();
                }
            }
            family(z)
        })
}

fn periods(p: &multiscale::charts::ChartPoint) -> BTreeMap<(usize, usize), ExtendedValue> {
    let n = p.n();
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), p.period(i, j).unwrap()))
        .collect()
}

#[test]
fn worked_examples() {
    let f = family(vec![vec![(0, qi(0))], vec![(0, qi(1))], vec![(-1, qi(1))]]);
    let v = f.pair_valuations();
    assert_eq!(v[&(1, 2)], Valuation::Finite(0));
    assert_eq!(v[&(1, 3)], Valuation::Finite(-1));
    assert_eq!(v[&(2, 3)], Valuation::Finite(-1));
    assert_eq!(f.limit_chain().label(), "12|3");
    let p = f.limit_point().unwrap();
    assert_eq!(p.indices(), &[(1, 3)]);
    for pair in [(1, 2), (1, 3), (2, 3)] {
        assert_eq!(p.z_map()[&pair], qi(1));
    }
    assert_eq!(p.t_values(), &[qi(0)]);

    let g = family(vec![vec![(0, qi(0))], vec![(-1, qi(1))], vec![(-1, qi(1)), (-2, qi(1))]]);
    let v = g.pair_valuations();
    assert_eq!(v[&(1, 2)], Valuation::Finite(-1));
    assert_eq!(v[&(1, 3)], Valuation::Finite(-2));
    assert_eq!(v[&(2, 3)], Valuation::Finite(-2));
    assert_eq!(g.limit_chain().label(), "12|3 < 1|2|3");
    let p = g.limit_point().unwrap();
    assert_eq!(p.indices(), &[(1, 3), (1, 2)]);
    assert_eq!(p.z(1, 3), qi(1));
    assert_eq!(p.z(2, 3), qi(1));
    assert_eq!(p.z(1, 2), qi(1));
    assert_eq!(p.t_values(), &[qi(0), qi(0)]);

    // Rescaling the first family by t^-1 gives the second tree.
    assert_eq!(f.rescale(-1).limit_chain().label(), "12|3 < 1|2|3");
    assert_eq!(f.rescale(0), f);
    assert!(f.rescale(5).limit_tree().ell() == 0);

    let c = LaurentFamily::constant(&[qi(0), qi(1), qi(2)]);
    let p = c.limit_point().unwrap();
    assert_eq!(p, multiscale::charts::ChartPoint::from_configuration(&[qi(0), qi(1), qi(2)]));
}

#[test]
fn many_random_families_agree_with_the_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for k in 0..1500 {
        let n = 2 + k % 4;
        let f = multiscale::sampling::random_family(&mut rng, n, -3, 3, 3, 0.15);
        assert_eq!(f.limit_tree(), minimal_pair_tree(&f), "{f:?}");
        let p = f.limit_point().unwrap();
        for ((i, j), per) in periods(&p) {
            assert_eq!(per, symbolic_limit(&f, i, j));
            let same_terminal = p.tree().terminal_of(i) == p.tree().terminal_of(j);
            assert_eq!(per.is_infinite(), !same_terminal);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn tree_matches_minimal_pair_construction(f in families(5)) {
        prop_assert_eq!(f.limit_tree(), minimal_pair_tree(&f));
    }

    #[test]
    fn limit_periods_are_symbolic_limits(f in families(5)) {
        let p = f.limit_point().unwrap();
        prop_assert!(p.validate().is_ok());
        prop_assert!(p.t_values().iter().all(Zero::is_zero));
        for ((i, j), per) in periods(&p) {
            prop_assert_eq!(&per, &symbolic_limit(&f, i, j));
            prop_assert_eq!(per.is_infinite(), p.tree().terminal_of(i) != p.tree().terminal_of(j));
        }
    }

    #[test]
    fn valuations_are_ultrametric(f in families(5)) {
        let n = f.n();
        let v = |i: usize, j: usize| f.difference(i.min(j), i.max(j)).valuation();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if i != j && j != k && i != k {
                        prop_assert!(v(i, k) >= v(i, j).min(v(j, k)));
                    }
                }
            }
        }
    }

    #[test]
    fn chain_records_meet_levels(f in families(5)) {
        let tree = f.limit_tree();
        let chain = f.limit_chain();
        let n = f.n();
        for k in 0..=tree.ell() {
            let rho = chain.rho(k);
            for i in 1..=n {
                for j in i + 1..=n {
                    prop_assert_eq!(rho.same_block(i, j), tree.meet_level(i, j) >= k);
                }
            }
        }
    }

    #[test]
    fn high_order_terms_do_not_matter(
        f in families(5),
        extra in proptest::collection::vec(proptest::collection::vec((1i32..=4, rational()), 0..3), 5),
    ) {
        let z = f
            .components()
            .iter()
            .zip(&extra)
            .map(|(p, e)| p.add(&LaurentPolynomial::new(e.clone())))
            .collect();
        let g = LaurentFamily::new(z).unwrap();
        prop_assert_eq!(g.limit_tree(), f.limit_tree());
        prop_assert_eq!(g.limit_point().unwrap(), f.limit_point().unwrap());
    }

    #[test]
    fn translation_shifts_terminal_positions(f in families(5), c in proptest::collection::vec(rational(), 5)) {
        let n = f.n();
        let g = f.translate(&c[..n]).unwrap();
        let (p, pg) = (f.limit_point().unwrap(), g.limit_point().unwrap());
        prop_assert_eq!(pg.tree(), p.tree());
        for i in 1..=n {
            for j in i + 1..=n {
                let expected = if p.tree().terminal_of(i) == p.tree().terminal_of(j) {
                    p.z(i, j) + &c[j - 1] - &c[i - 1]
                } else {
                    p.z(i, j)
                };
                prop_assert_eq!(pg.z(i, j), expected);
            }
        }
    }

    #[test]
    fn relabelling_is_equivariant(f in families(5), seed in any::<u64>()) {
        let sigma = random_permutation(&mut ChaCha8Rng::seed_from_u64(seed), f.n());
        let g = f.permute(&sigma).unwrap();
        prop_assert_eq!(g.limit_tree(), apply_permutation(&sigma, &f.limit_tree()).unwrap());
        let (p, pg) = (f.limit_point().unwrap(), g.limit_point().unwrap());
        let inv = sigma.inverse();
        for i in 1..=f.n() {
            for j in 1..=f.n() {
                if i != j {
                    prop_assert_eq!(pg.period(i, j).unwrap(), p.period(inv.apply(i), inv.apply(j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn rescaling_shifts_valuations(f in families(5), k in -3i32..=3) {
        let g = f.rescale(k);
        for ((pair, v), w) in f.pair_valuations().iter().zip(g.pair_valuations().values()) {
            let expected = match v {
                Valuation::Finite(e) => Valuation::Finite(e + k),
                Valuation::Infinite => Valuation::Infinite,
            };
            prop_assert_eq!(*w, expected, "{:?}", pair);
        }
    }
}

#[test]
fn permanent_collisions_land_in_collision_strata() {
    let f = family(vec![vec![(-1, q(1, 2))], vec![(-1, q(1, 2))], vec![(0, qi(3))]]);
    let p = f.limit_point().unwrap();
    assert_eq!(p.period(1, 2).unwrap(), ExtendedValue::Finite(qi(0)));
    assert_eq!(p.collision_partition().label(), "12|3");
}
