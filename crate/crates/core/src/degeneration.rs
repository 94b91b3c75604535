//! Limits of one-parameter families of configurations as `t → 0`.
//!
//! Each mark moves along a Laurent polynomial `z_i(t)`. The valuation of a
//! pairwise difference is the exponent of its lowest term: negative
//! valuations escape to infinity, and the more negative, the faster. Marks
//! whose differences stay bounded end on a common terminal vertex; every
//! distinct negative valuation becomes one level of the limit tree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;

use crate::charts::{default_indices, ChartPoint};
use crate::error::{Error, Result};
use crate::leveltrees::{chain_to_tree, DualLevelTree};
use crate::partitions::{Partition, PartitionChain};
use crate::perm::Permutation;
use crate::rational::Q;

/// A Laurent polynomial over `Q`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i32, Q>,
}

/// The valuation of a Laurent polynomial: its least exponent, or `+∞` for 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i32),
    Infinite,
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Valuation {
    /// Bounded as `t → 0`.
    pub fn is_bounded(self) -> bool {
        self >= Valuation::Finite(0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl LaurentPolynomial {
    pub fn new(terms: impl IntoIterator<Item = (i32, Q)>) -> Self {
        let mut out = LaurentPolynomial::default();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn constant(c: Q) -> Self {
        Self::new([(0, c)])
    }

    /// `c·t^e`.
    pub fn monomial(e: i32, c: Q) -> Self {
        Self::new([(e, c)])
    }

    fn add_term(&mut self, e: i32, c: Q) {
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i32, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Valuation {
        self.terms
            .keys()
            .next()
            .map_or(Valuation::Infinite, |&e| Valuation::Finite(e))
    }

    /// Coefficient of the lowest term.
    pub fn leading_coefficient(&self) -> Option<&Q> {
        self.terms.values().next()
    }

    pub fn coefficient(&self, e: i32) -> Q {
        self.terms.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn sub(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, -c.clone());
        }
        out
    }

    pub fn add(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    /// `t^k · self`.
    pub fn shifted(&self, k: i32) -> LaurentPolynomial {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// The largest exponent present, if any.
    pub fn top_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }
}

/// `n` Laurent polynomials, one per mark.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentFamily {
    z: Vec<LaurentPolynomial>,
}

impl LaurentFamily {
    pub fn new(z: Vec<LaurentPolynomial>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::invalid("family", "need at least one mark"));
        }
        Ok(LaurentFamily { z })
    }

    /// The constant family at the given positions.
    pub fn constant(positions: &[Q]) -> Self {
        LaurentFamily {
            z: positions.iter().cloned().map(LaurentPolynomial::constant).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn components(&self) -> &[LaurentPolynomial] {
        &self.z
    }

    /// `Π_ij(t) = z_j(t) − z_i(t)`.
    pub fn difference(&self, i: usize, j: usize) -> LaurentPolynomial {
        self.z[j - 1].sub(&self.z[i - 1])
    }

    /// Valuations of all differences `z_j − z_i`, `i < j`.
    pub fn pair_valuations(&self) -> BTreeMap<(usize, usize), Valuation> {
        let n = self.n();
        let mut out = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.insert((i, j), self.difference(i, j).valuation());
            }
        }
        out
    }

    /// Multiplies every component by `t^k`.
    pub fn rescale(&self, k: i32) -> LaurentFamily {
        LaurentFamily {
            z: self.z.iter().map(|p| p.shifted(k)).collect(),
        }
    }

    /// Adds a constant to each component.
    pub fn translate(&self, c: &[Q]) -> Result<LaurentFamily> {
        if c.len() != self.n() {
            return Err(Error::domain("translation length differs from family size"));
        }
        Ok(LaurentFamily {
            z: self
                .z
                .iter()
                .zip(c)
                .map(|(p, c)| p.add(&LaurentPolynomial::constant(c.clone())))
                .collect(),
        })
    }

    /// Relabels marks: component `i` of the result is component `σ⁻¹(i)`.
    pub fn permute(&self, sigma: &Permutation) -> Result<LaurentFamily> {
        if sigma.n() != self.n() {
            return Err(Error::domain("permutation size differs from family size"));
        }
        let inv = sigma.inverse();
        Ok(LaurentFamily {
            z: (1..=self.n()).map(|i| self.z[inv.apply(i) - 1].clone()).collect(),
        })
    }

    /// The tree of the limit point.
    pub fn limit_tree(&self) -> DualLevelTree {
        chain_to_tree(&self.limit_chain())
    }

    /// The chain of the limit: with `w_0 < ⋯ < w_{ℓ−1}` the distinct negative
    /// valuations, `ρ_k` joins `i, j` when `v_ij ≥ w_k` (and `ρ_ℓ` when
    /// `v_ij ≥ 0`).
    pub fn limit_chain(&self) -> PartitionChain {
        let n = self.n();
        let vals = self.pair_valuations();
        let negative: BTreeSet<i32> = vals
            .values()
            .filter_map(|v| match v {
                Valuation::Finite(e) if *e < 0 => Some(*e),
                _ => None,
            })
            .collect();
        let thresholds: Vec<Valuation> = negative
            .iter()
            .skip(1)
            .map(|&e| Valuation::Finite(e))
            .chain(negative.first().map(|_| Valuation::Finite(0)))
            .collect();
        let rhos = thresholds
            .iter()
            .map(|&w| {
                let labels: Vec<usize> = (1..=n)
                    .map(|i| {
                        (1..=i)
                            .find(|&j| j == i || vals[&(j, i)] >= w)
                            .expect("j = i qualifies")
                    })
                    .collect();
                Partition::from_labels(&labels)
            })
            .collect();
        PartitionChain::new(n, rhos).expect("valuations are ultrametric")
    }

    /// The limit point: on the limit tree with every `t` zero and default
    /// normalizing pairs. Separated pairs get the leading-coefficient ratio
    /// against the level's normalizing pair; pairs on a common terminal get
    /// the constant term of their difference.
    pub fn limit_point(&self) -> Result<ChartPoint> {
        let tree = self.limit_tree();
        let n = self.n();
        let indices = default_indices(&tree);
        let ell = tree.ell();
        let mut z = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let m = tree.meet_level(i, j);
                let d = self.difference(i, j);
                let value = if m == ell {
                    if !d.valuation().is_bounded() {
                        return Err(Error::Defect(format!(
                            "pair ({i},{j}) shares a terminal but diverges"
                        )));
                    }
                    d.coefficient(0)
                } else {
                    let (a, b) = indices[m];
                    let norm = self.difference(a, b);
                    if d.valuation() != norm.valuation() {
                        return Err(Error::Defect(format!(
                            "pair ({i},{j}) and normalizing pair ({a},{b}) diverge at different rates"
                        )));
                    }
                    let lc = d.leading_coefficient().expect("separated pairs differ");
                    lc / norm.leading_coefficient().expect("separated pairs differ")
                };
                z.insert((i, j), value);
            }
        }
        let t = vec![Q::zero(); ell];
        let p = ChartPoint::unchecked(tree, indices, z, t);
        p.validate()
            .map_err(|v| Error::Defect(format!("limit point fails validation: {v}")))?;
        Ok(p)
    }
}

pub fn pair_valuations(family: &LaurentFamily) -> BTreeMap<(usize, usize), Valuation> {
    family.pair_valuations()
}

pub fn limit_tree(family: &LaurentFamily) -> DualLevelTree {
    family.limit_tree()
}

pub fn limit_point(family: &LaurentFamily) -> Result<ChartPoint> {
    family.limit_point()
}

pub fn rescale_family(family: &LaurentFamily, k: i32) -> LaurentFamily {
    family.rescale(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn fam(rows: &[&[(i32, i64)]]) -> LaurentFamily {
        LaurentFamily::new(
            rows.iter()
                .map(|r| LaurentPolynomial::new(r.iter().map(|&(e, c)| (e, qi(c)))))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn polynomial_basics() {
        let p = LaurentPolynomial::new([(1, qi(2)), (1, qi(-2)), (-1, qi(3))]);
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.valuation(), Valuation::Finite(-1));
        assert_eq!(LaurentPolynomial::default().valuation(), Valuation::Infinite);
        assert!(Valuation::Infinite > Valuation::Finite(100));
        assert_eq!(p.shifted(2).valuation(), Valuation::Finite(1));
    }

    #[test]
    fn valuation_examples() {
        let f = fam(&[&[(0, 0)], &[(0, 1)], &[(-1, 1)]]);
        let v = f.pair_valuations();
        assert_eq!(v[&(1, 2)], Valuation::Finite(0));
        assert_eq!(v[&(1, 3)], Valuation::Finite(-1));
        assert_eq!(v[&(2, 3)], Valuation::Finite(-1));
        let g = fam(&[&[], &[(-1, 1)], &[(-1, 1), (-2, 1)]]);
        let v = g.pair_valuations();
        assert_eq!(
            (v[&(1, 2)], v[&(1, 3)], v[&(2, 3)]),
            (Valuation::Finite(-1), Valuation::Finite(-2), Valuation::Finite(-2))
        );
    }

    #[test]
    fn limit_tree_examples() {
        let c = LaurentFamily::constant(&[qi(0), qi(1), qi(2)]);
        assert_eq!(c.limit_tree(), DualLevelTree::single_vertex(3));
        let f = fam(&[&[(0, 0)], &[(0, 1)], &[(-1, 1)]]);
        assert_eq!(f.limit_chain().label(), "12|3");
        let g = fam(&[&[], &[(-1, 1)], &[(-1, 1), (-2, 1)]]);
        assert_eq!(g.limit_chain().label(), "12|3 < 1|2|3");
        assert_eq!(f.rescale(-1).limit_chain().label(), "12|3 < 1|2|3");
        assert!(f.rescale(5).limit_chain().is_empty());
    }

    #[test]
    fn limit_point_examples() {
        let c = LaurentFamily::constant(&[qi(0), qi(1), qi(2)]);
        assert_eq!(
            c.limit_point().unwrap(),
            ChartPoint::from_configuration(&[qi(0), qi(1), qi(2)])
        );
        let f = fam(&[&[(0, 0)], &[(0, 1)], &[(-1, 1)]]);
        let p = f.limit_point().unwrap();
        assert_eq!(p.indices(), &[(1, 3)]);
        assert_eq!((p.z(1, 3), p.z(2, 3), p.z(1, 2)), (qi(1), qi(1), qi(1)));
        assert_eq!(p.t(1), &qi(0));
        let g = fam(&[&[], &[(-1, 1)], &[(-1, 1), (-2, 1)]]);
        let p = g.limit_point().unwrap();
        assert_eq!(p.indices(), &[(1, 3), (1, 2)]);
        assert_eq!((p.z(1, 3), p.z(2, 3), p.z(1, 2)), (qi(1), qi(1), qi(1)));
    }

    #[test]
    fn permanent_collision() {
        let f = fam(&[&[(-1, 2)], &[(-1, 2)], &[(0, 1)]]);
        let p = f.limit_point().unwrap();
        assert_eq!(p.collision_partition().label(), "12|3");
    }
}
