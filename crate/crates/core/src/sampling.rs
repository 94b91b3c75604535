//! Seeded random generators for chart points, families and permutations.
//!
//! Chart points are built from geometric data rather than by solving the
//! cocycle relations: every inner vertex places its children at distinct
//! positions, every terminal places its marks, and `z_ij` sums the scaled
//! offsets along the two paths up from the meet. Each level is then
//! rescaled so its normalizing pair has `z = 1`.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::charts::{default_indices, ChartPoint, IndexChoice};
use crate::degeneration::{LaurentFamily, LaurentPolynomial};
use crate::leveltrees::DualLevelTree;
use crate::perm::Permutation;
use crate::rational::Q;

/// A random rational with numerator in `-max_num..=max_num` and denominator
/// in `1..=max_den`.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Q {
    Q::new(
        BigInt::from(rng.gen_range(-max_num..=max_num)),
        BigInt::from(rng.gen_range(1..=max_den)),
    )
}

pub fn random_nonzero_q<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Q {
    loop {
        let v = random_q(rng, max_num, max_den);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("a shuffle is a bijection")
}

/// Knobs for [`random_point`].
#[derive(Clone, Copy, Debug)]
pub struct PointOptions {
    /// Probability that a given `t_m` is zero.
    pub zero_t: f64,
    /// Probability that a mark copies the position of an earlier mark on
    /// the same terminal vertex.
    pub collide: f64,
    /// Draw normalizing pairs at random instead of the default choice.
    pub random_indices: bool,
}

impl Default for PointOptions {
    fn default() -> Self {
        PointOptions {
            zero_t: 0.3,
            collide: 0.0,
            random_indices: true,
        }
    }
}

/// A random index choice: for each level, a random ordered pair meeting there.
pub fn random_indices<R: Rng + ?Sized>(rng: &mut R, tree: &DualLevelTree) -> IndexChoice {
    let n = tree.n();
    (0..tree.ell())
        .map(|m| {
            let pairs: Vec<(usize, usize)> = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && tree.meet_level(i, j) == m)
                .collect();
            *pairs.choose(rng).expect("every level below the top is a meet level")
        })
        .collect()
}

/// A uniformly seeded random valid point of the chart of `tree`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, tree: &DualLevelTree, opts: PointOptions) -> ChartPoint {
    let n = tree.n();
    let ell = tree.ell();
    loop {
        let t: Vec<Q> = (0..ell)
            .map(|_| {
                if rng.gen_bool(opts.zero_t) {
                    Q::zero()
                } else {
                    random_nonzero_q(rng, 6, 4)
                }
            })
            .collect();
        let tau = |p: usize, q: usize| (p + 1..=q).fold(Q::one(), |acc, r| acc * &t[r - 1]);
        // Offset of each vertex relative to its parent; the first child of
        // every inner vertex sits at 0 and siblings are distinct.
        let mut offset = vec![Q::zero(); tree.vertices().len()];
        for v in tree.vertices() {
            let mut used = vec![Q::zero()];
            for &c in v.children.iter().skip(1) {
                let x = loop {
                    let x = random_q(rng, 9, 5);
                    if !used.contains(&x) {
                        break x;
                    }
                };
                used.push(x.clone());
                offset[c] = x;
            }
        }
        let mut mark_pos: Vec<Q> = vec![Q::zero(); n + 1];
        for i in 1..=n {
            let home = tree.terminal_of(i);
            let earlier: Vec<usize> = (1..i).filter(|&j| tree.terminal_of(j) == home).collect();
            mark_pos[i] = if !earlier.is_empty() && rng.gen_bool(opts.collide) {
                mark_pos[*earlier.choose(rng).expect("nonempty")].clone()
            } else {
                random_q(rng, 9, 5)
            };
        }
        // Sum of scaled offsets from just above `v` up to mark `i`.
        let climb = |v: usize, i: usize| -> Q {
            let m = tree.level(v);
            let mut total = mark_pos[i].clone() * tau(m, ell);
            let mut cur = tree.terminal_of(i);
            while cur != v {
                total += &offset[cur] * tau(m, tree.level(tree.vertex(cur).parent.expect("below v")));
                cur = tree.vertex(cur).parent.expect("below v");
            }
            total
        };
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let v = tree.meet_index(i, j);
                z.insert((i, j), climb(v, j) - climb(v, i));
            }
        }
        let indices = if opts.random_indices {
            random_indices(rng, tree)
        } else {
            default_indices(tree)
        };
        let raw = ChartPoint::unchecked(tree.clone(), vec![(0, 0); ell], z, t);
        let scales: Vec<Q> = indices.iter().map(|&(i, j)| raw.z(i, j)).collect();
        if scales.iter().any(Q::is_zero) {
            continue;
        }
        let mut z = raw.z_map().clone();
        for ((i, j), v) in z.iter_mut() {
            let m = tree.meet_level(*i, *j);
            if m < ell {
                *v /= &scales[m];
            }
        }
        let mut t = raw.t_values().to_vec();
        for (m, c) in scales.iter().enumerate() {
            if m >= 1 {
                t[m - 1] *= c;
            }
            t[m] /= c;
        }
        if let Ok(p) = ChartPoint::new(tree.clone(), indices, z, t) {
            return p;
        }
    }
}

/// A random Laurent family with exponents in `lo..=hi`, up to `max_terms`
/// terms per component. With probability `repeat` a component copies an
/// earlier one (a permanent collision).
pub fn random_family<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lo: i32,
    hi: i32,
    max_terms: usize,
    repeat: f64,
) -> LaurentFamily {
    let mut z: Vec<LaurentPolynomial> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.gen_bool(repeat) {
            let c = z[rng.gen_range(0..i)].clone();
            z.push(c);
            continue;
        }
        let k = rng.gen_range(0..=max_terms);
        z.push(LaurentPolynomial::new(
            (0..k).map(|_| (rng.gen_range(lo..=hi), random_nonzero_q(rng, 5, 3))),
        ));
    }
    LaurentFamily::new(z).expect("n > 0")
}
