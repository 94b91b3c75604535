//! The braid matroid and the Chow ring of its augmented wonderful variety.
//!
//! The ring is `Q[x_ρ : ρ ≠ ⊥]` modulo
//!
//! * `x_ρ·x_π` for incomparable `ρ, π`, and
//! * `x_π · Σ_{ρ : i ≁ρ j} x_ρ` for every `π` and every `i < j` with `i ≁π j`.
//!
//! Generators are numbered in the order `(dim ρ, canonical order)`, and the
//! monomial order is degree-reverse-lexicographic with generator 0 largest.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groebner::{add_term, mul_poly, GroebnerBasis, Mono, Poly};
use crate::limits::Limits;
use crate::partitions::{all_partitions, Partition, PartitionChain};
use crate::rational::{format_q, Q};

/// Flats of the braid matroid `M(K_n)` in terms of partitions: the flat of
/// `ρ` is the set of edges inside its blocks.
#[derive(Clone, Debug)]
pub struct FlatDictionary {
    pub n: usize,
    /// Edges `(i, j)`, `i < j`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
    pub partitions: Vec<Partition>,
    /// Edge index sets, parallel to `partitions`.
    pub flats: Vec<Vec<usize>>,
}

impl FlatDictionary {
    /// `n − |B(ρ)|`.
    pub fn rank(rho: &Partition) -> usize {
        rho.n() - rho.num_blocks()
    }

    /// `|B(ρ)| − 1`.
    pub fn corank(rho: &Partition) -> usize {
        rho.num_blocks() - 1
    }

    /// The partition whose flat is the closure of the given edge set:
    /// connected components of the spanned graph.
    pub fn closure(&self, edge_set: &[usize]) -> Partition {
        let mut label: Vec<usize> = (0..self.n).collect();
        loop {
            let mut changed = false;
            for &e in edge_set {
                let (i, j) = self.edges[e];
                let m = label[i - 1].min(label[j - 1]);
                if label[i - 1] != m || label[j - 1] != m {
                    label[i - 1] = m;
                    label[j - 1] = m;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Partition::from_labels(&label)
    }

    pub fn flat_of(&self, rho: &Partition) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| {
                let (i, j) = self.edges[e];
                rho.same_block(i, j)
            })
            .collect()
    }
}

pub fn flats(n: usize) -> Result<FlatDictionary> {
    flats_with(n, &Limits::from_env())
}

pub fn flats_with(n: usize, limits: &Limits) -> Result<FlatDictionary> {
    Limits::check("flat enumeration", n, limits.chains)?;
    let edges: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let partitions = all_partitions(n);
    let mut dict = FlatDictionary {
        n,
        edges,
        partitions,
        flats: Vec::new(),
    };
    dict.flats = dict.partitions.iter().map(|p| dict.flat_of(p)).collect();
    Ok(dict)
}

/// Where a relation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// `x_ρ·x_π` for an incomparable pair.
    Incomparable,
    /// `x_π·y_ij` for a pair `i < j` separated by `π`.
    Separated { pi: usize, i: usize, j: usize },
}

/// An element of the polynomial ring on the generators, or of the quotient
/// once passed through [`ChowRing::normal_form`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChowElement {
    terms: Poly,
}

impl ChowElement {
    pub fn zero() -> Self {
        ChowElement::default()
    }

    pub fn one() -> Self {
        Self::monomial(Mono::one(), Q::one())
    }

    pub fn monomial(m: Mono, c: Q) -> Self {
        let mut terms = Poly::new();
        add_term(&mut terms, m, c);
        ChowElement { terms }
    }

    /// The generator with the given index.
    pub fn generator(k: usize) -> Self {
        Self::monomial(Mono::var(k as u16), Q::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Q)>) -> Self {
        let mut out = Poly::new();
        for (m, c) in terms {
            add_term(&mut out, m, c);
        }
        ChowElement { terms: out }
    }

    pub fn terms(&self) -> &Poly {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ChowElement) -> ChowElement {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        ChowElement { terms }
    }

    pub fn sub(&self, other: &ChowElement) -> ChowElement {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> ChowElement {
        if c.is_zero() {
            return ChowElement::zero();
        }
        ChowElement {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &ChowElement) -> ChowElement {
        ChowElement {
            terms: mul_poly(&self.terms, &other.terms),
        }
    }

    /// Largest degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Mono::degree).max()
    }

    /// Renders with generator names, leading term first.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono = if m.degree() == 0 {
                    "1".to_string()
                } else {
                    m.0.iter().map(|&v| format!("x[{}]", names[v as usize])).collect::<Vec<_>>().join("*")
                };
                format!("{}*{}", format_q(c), mono)
            })
            .collect();
        parts.join(" + ")
    }
}

/// A presented Chow ring with a truncated Gröbner basis of its ideal.
#[derive(Debug)]
pub struct ChowRing {
    n: usize,
    generators: Vec<Partition>,
    index: HashMap<Partition, usize>,
    relations: Vec<(RelationKind, ChowElement)>,
    basis: GroebnerBasis,
    hilbert: Vec<usize>,
}

/// Generators and relations, without any Gröbner computation.
pub fn presentation(n: usize) -> Result<(Vec<Partition>, Vec<(RelationKind, ChowElement)>)> {
    presentation_with(n, &Limits::from_env())
}

pub fn presentation_with(n: usize, limits: &Limits) -> Result<(Vec<Partition>, Vec<(RelationKind, ChowElement)>)> {
    Limits::check("Chow ring", n, limits.chow)?;
    Ok(build_presentation(n))
}

fn build_presentation(n: usize) -> (Vec<Partition>, Vec<(RelationKind, ChowElement)>) {
    let generators: Vec<Partition> = all_partitions(n).into_iter().filter(|p| !p.is_bottom()).collect();
    let x = |k: usize| ChowElement::generator(k);
    let mut relations = Vec::new();
    for a in 0..generators.len() {
        for b in a + 1..generators.len() {
            if !generators[a].leq_unchecked(&generators[b]) && !generators[b].leq_unchecked(&generators[a]) {
                relations.push((RelationKind::Incomparable, x(a).mul(&x(b))));
            }
        }
    }
    for (p, pi) in generators.iter().enumerate() {
        for i in 1..=n {
            for j in i + 1..=n {
                if !pi.same_block(i, j) {
                    relations.push((RelationKind::Separated { pi: p, i, j }, x(p).mul(&y_sum(&generators, i, j))));
                }
            }
        }
    }
    (generators, relations)
}

/// `y_ij = Σ_{ρ : i ≁ρ j} x_ρ`.
fn y_sum(generators: &[Partition], i: usize, j: usize) -> ChowElement {
    ChowElement::from_terms(
        generators
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.same_block(i, j))
            .map(|(k, _)| (Mono::var(k as u16), Q::one())),
    )
}

type Cache = Mutex<HashMap<usize, Arc<ChowRing>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ChowRing {
    /// The ring for `n` marks, computed once per process and shared.
    pub fn get(n: usize) -> Result<Arc<ChowRing>> {
        Self::get_with(n, &Limits::from_env(), Exec::Sequential)
    }

    pub fn get_with(n: usize, limits: &Limits, exec: Exec) -> Result<Arc<ChowRing>> {
        Limits::check("Chow ring", n, limits.chow)?;
        if let Some(r) = cache().lock().expect("cache lock").get(&n) {
            return Ok(Arc::clone(r));
        }
        // Computed outside the lock; a racing thread computes the same value.
        let ring = Arc::new(Self::compute(n, exec)?);
        let mut guard = cache().lock().expect("cache lock");
        Ok(Arc::clone(guard.entry(n).or_insert(ring)))
    }

    /// Uncached computation.
    pub fn compute(n: usize, exec: Exec) -> Result<ChowRing> {
        let (generators, relations) = build_presentation(n);
        let index = generators.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();
        let polys: Vec<Poly> = relations.iter().map(|(_, r)| r.terms.clone()).collect();
        // The ring vanishes above degree n − 1; computing through degree n
        // lets us confirm that instead of assuming it.
        let basis = GroebnerBasis::compute(generators.len(), &polys, n, exec);
        let standard = basis.standard_monomials(n);
        if !standard[n].is_empty() {
            return Err(Error::Defect(format!(
                "the Chow ring has {} standard monomials in degree {n}",
                standard[n].len()
            )));
        }
        let hilbert = standard[..n].iter().map(Vec::len).collect();
        Ok(ChowRing {
            n,
            generators,
            index,
            relations,
            basis,
            hilbert,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Partition] {
        &self.generators
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(Partition::label).collect()
    }

    pub fn generator_index(&self, rho: &Partition) -> Result<usize> {
        self.index
            .get(rho)
            .copied()
            .ok_or_else(|| Error::domain(format!("{rho} is not a generator for n = {}", self.n)))
    }

    pub fn x(&self, rho: &Partition) -> Result<ChowElement> {
        Ok(ChowElement::generator(self.generator_index(rho)?))
    }

    /// `y_ij = Σ_{ρ : i ≁ρ j} x_ρ`.
    pub fn y(&self, i: usize, j: usize) -> ChowElement {
        y_sum(&self.generators, i, j)
    }

    pub fn relations(&self) -> &[(RelationKind, ChowElement)] {
        &self.relations
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.basis
    }

    /// Dimensions of the graded pieces in degrees `0..n`.
    pub fn hilbert(&self) -> &[usize] {
        &self.hilbert
    }

    /// Standard monomials of degree `d`, a basis of that graded piece.
    pub fn monomial_basis(&self, d: usize) -> Vec<ChowElement> {
        if d >= self.n {
            return Vec::new();
        }
        self.basis.standard_monomials(d)[d]
            .iter()
            .map(|m| ChowElement::monomial(m.clone(), Q::one()))
            .collect()
    }

    /// The reduced representative of `e` in the quotient.
    pub fn normal_form(&self, e: &ChowElement) -> Result<ChowElement> {
        if let Some(m) = e.terms.keys().find(|m| m.0.iter().any(|&v| v as usize >= self.generators.len())) {
            return Err(Error::domain(format!("monomial {m:?} uses an unknown generator")));
        }
        let low: Poly = e
            .terms
            .iter()
            .filter(|(m, _)| m.degree() < self.n)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Ok(ChowElement {
            terms: self.basis.reduce(&low),
        })
    }

    /// Product of the generators of a chain: the class of its closed stratum.
    pub fn stratum_class(&self, chain: &PartitionChain) -> Result<ChowElement> {
        if chain.n() != self.n {
            return Err(Error::domain("chain and ring have different n"));
        }
        chain
            .elements()
            .iter()
            .try_fold(ChowElement::one(), |acc, rho| Ok(acc.mul(&self.x(rho)?)))
    }
}

/// Graded dimensions of the Chow ring for `n` marks.
pub fn hilbert(n: usize) -> Result<Vec<usize>> {
    Ok(ChowRing::get(n)?.hilbert().to_vec())
}

pub fn normal_form(e: &ChowElement, n: usize) -> Result<ChowElement> {
    ChowRing::get(n)?.normal_form(e)
}

/// A relation rendered for output.
pub fn describe_relation(kind: &RelationKind, generators: &[Partition]) -> String {
    match kind {
        RelationKind::Incomparable => "incomparable".to_string(),
        RelationKind::Separated { pi, i, j } => format!("x[{}]*y[{i},{j}]", generators[*pi]),
    }
}

impl fmt::Display for ChowElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .map_or(Vec::new(), |top| (0..=top).map(|v| v.to_string()).collect());
        f.write_str(&self.render(&names))
    }
}

/// Sorted term list, handy for stable output.
pub fn terms_by_degree(e: &ChowElement) -> BTreeMap<usize, Vec<(Mono, Q)>> {
    let mut out: BTreeMap<usize, Vec<(Mono, Q)>> = BTreeMap::new();
    for (m, c) in e.terms.iter().rev() {
        out.entry(m.degree()).or_default().push((m.clone(), c.clone()));
    }
    out
}
