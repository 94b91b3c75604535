//! Homogeneous Buchberger algorithm over `Q` in degree-reverse-lexicographic
//! order, truncated at a fixed degree.
//!
//! Variables are numbered `0..nvars`; variable `0` is the largest. Pairs are
//! processed one degree at a time: all S-polynomials of a degree are
//! reduced against the basis so far (in parallel when asked), then the
//! remainders are interreduced in a fixed order, so the result never
//! depends on the execution mode.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::exec::Exec;
use crate::rational::Q;

/// A monomial as the sorted multiset of its variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: u16) -> Self {
        Mono(vec![v])
    }

    pub fn from_vars(mut vars: Vec<u16>) -> Self {
        vars.sort_unstable();
        Mono(vars)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            if self.0[a] <= other.0[b] {
                out.push(self.0[a]);
                a += 1;
            } else {
                out.push(other.0[b]);
                b += 1;
            }
        }
        out.extend_from_slice(&self.0[a..]);
        out.extend_from_slice(&other.0[b..]);
        Mono(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut b = 0;
        for &v in &self.0 {
            if b < other.0.len() && other.0[b] == v {
                b += 1;
            } else if b < other.0.len() && other.0[b] < v {
                return None;
            } else {
                out.push(v);
            }
        }
        (b == other.0.len()).then_some(Mono(out))
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() || b < other.0.len() {
            match (self.0.get(a), other.0.get(b)) {
                (Some(x), Some(y)) if x == y => {
                    out.push(*x);
                    a += 1;
                    b += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(*x);
                    a += 1;
                }
                (Some(_), Some(y)) => {
                    out.push(*y);
                    b += 1;
                }
                (Some(x), None) => {
                    out.push(*x);
                    a += 1;
                }
                (None, Some(y)) => {
                    out.push(*y);
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Mono(out)
    }

    pub fn coprime(&self, other: &Mono) -> bool {
        self.lcm(other).degree() == self.degree() + other.degree()
    }

    /// Every distinct sub-multiset of degree at least `min_degree`.
    fn divisors(&self, min_degree: usize) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(m: &[u16], i: usize, cur: &mut Vec<u16>, min: usize, out: &mut Vec<Mono>) {
            if i == m.len() {
                if cur.len() >= min {
                    out.push(Mono(cur.clone()));
                }
                return;
            }
            let mut j = i;
            while j < m.len() && m[j] == m[i] {
                j += 1;
            }
            for take in 0..=(j - i) {
                for _ in 0..take {
                    cur.push(m[i]);
                }
                rec(m, j, cur, min, out);
                for _ in 0..take {
                    cur.pop();
                }
            }
        }
        rec(&self.0, 0, &mut cur, min_degree, &mut out);
        out
    }
}

/// Degree first, then reverse lexicographic: among monomials of one degree,
/// the one with the smaller exponent on the smallest variable where they
/// differ is larger.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Equal => {}
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial; the last key is the leading monomial.
pub type Poly = BTreeMap<Mono, Q>;

pub fn add_term(p: &mut Poly, m: Mono, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(m.clone()).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        p.remove(&m);
    }
}

pub fn mul_poly(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_term(&mut out, ma.mul(mb), ca * cb);
        }
    }
    out
}

fn make_monic(mut p: Poly) -> Poly {
    let lc = p.values().next_back().expect("nonzero").clone();
    if !lc.is_one() {
        for c in p.values_mut() {
            *c /= &lc;
        }
    }
    p
}

/// A Gröbner basis truncated at `max_degree`: normal forms are exact for
/// polynomials of degree at most `max_degree`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    nvars: usize,
    max_degree: usize,
    /// Monic elements; the last key of each is its leading monomial.
    basis: Vec<Poly>,
    leading: HashMap<Mono, usize>,
    min_lt_degree: usize,
}

impl GroebnerBasis {
    /// Computes a basis of the ideal generated by homogeneous `generators`.
    pub fn compute(nvars: usize, generators: &[Poly], max_degree: usize, exec: Exec) -> Self {
        let mut gb = GroebnerBasis {
            nvars,
            max_degree,
            basis: Vec::new(),
            leading: HashMap::new(),
            min_lt_degree: usize::MAX,
        };
        let mut inputs: BTreeMap<usize, Vec<Poly>> = BTreeMap::new();
        for g in generators.iter().filter(|g| !g.is_empty()) {
            let d = g.keys().next_back().expect("nonzero").degree();
            debug_assert!(g.keys().all(|m| m.degree() == d), "generators must be homogeneous");
            inputs.entry(d).or_default().push(g.clone());
        }
        // Pending pairs grouped by the degree of their lcm.
        let mut pairs: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let first = inputs.keys().next().copied().unwrap_or(max_degree + 1);
        for d in first..=max_degree {
            let todo = pairs.remove(&d).unwrap_or_default();
            let todo: Vec<(usize, usize)> = todo.into_iter().filter(|&(i, j)| !gb.chain_redundant(i, j)).collect();
            let mut candidates: Vec<Poly> = exec.map(&todo, |&(i, j)| gb.reduce(&gb.s_poly(i, j)));
            if let Some(input) = inputs.remove(&d) {
                candidates.extend(exec.map(&input, |g| gb.reduce(g)));
            }
            let fresh = interreduce(candidates);
            for p in fresh {
                let k = gb.basis.len();
                let lt = p.keys().next_back().expect("nonzero").clone();
                for (i, g) in gb.basis.iter().enumerate() {
                    let other = g.keys().next_back().expect("nonzero");
                    // S-polynomials of monomials vanish, and coprime leading
                    // terms give pairs that reduce to zero.
                    if (p.len() == 1 && g.len() == 1) || lt.coprime(other) {
                        continue;
                    }
                    let deg = lt.lcm(other).degree();
                    if deg <= max_degree {
                        pairs.entry(deg).or_default().push((i, k));
                    }
                }
                gb.min_lt_degree = gb.min_lt_degree.min(lt.degree());
                gb.leading.insert(lt, k);
                gb.basis.push(p);
            }
        }
        gb
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn elements(&self) -> &[Poly] {
        &self.basis
    }

    fn lt(&self, i: usize) -> &Mono {
        self.basis[i].keys().next_back().expect("nonzero")
    }

    /// Skip `(i, j)` when some earlier leading term `k` divides the lcm and
    /// both `(i, k)` and `(j, k)` have strictly smaller lcm, hence already
    /// sit in a finished degree.
    fn chain_redundant(&self, i: usize, j: usize) -> bool {
        let l = self.lt(i).lcm(self.lt(j));
        l.divisors(self.min_lt_degree).into_iter().any(|d| match self.leading.get(&d) {
            Some(&k) if k != i && k != j => {
                self.lt(i).lcm(&d) != l && self.lt(j).lcm(&d) != l
            }
            _ => false,
        })
    }

    fn s_poly(&self, i: usize, j: usize) -> Poly {
        let l = self.lt(i).lcm(self.lt(j));
        let fi = l.div(self.lt(i)).expect("lcm");
        let fj = l.div(self.lt(j)).expect("lcm");
        let mut out = Poly::new();
        for (m, c) in &self.basis[i] {
            add_term(&mut out, m.mul(&fi), c.clone());
        }
        for (m, c) in &self.basis[j] {
            add_term(&mut out, m.mul(&fj), -c.clone());
        }
        out
    }

    /// A basis element whose leading term divides `m`, preferring the
    /// earliest one.
    pub fn divisor_of(&self, m: &Mono) -> Option<usize> {
        if m.degree() < self.min_lt_degree {
            return None;
        }
        m.divisors(self.min_lt_degree)
            .iter()
            .filter_map(|d| self.leading.get(d).copied())
            .min()
    }

    /// Full reduction of `p`: no monomial of the result is divisible by a
    /// leading term.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut work = p.clone();
        let mut rest = Poly::new();
        while let Some((m, c)) = work.pop_last() {
            match self.divisor_of(&m) {
                Some(k) => {
                    let f = m.div(self.lt(k)).expect("divides");
                    for (gm, gc) in self.basis[k].iter().rev().skip(1) {
                        add_term(&mut work, gm.mul(&f), -(&c * gc));
                    }
                }
                None => {
                    rest.insert(m, c);
                }
            }
        }
        rest
    }

    /// Whether `m` is a standard monomial (not divisible by any leading term).
    pub fn is_standard(&self, m: &Mono) -> bool {
        self.divisor_of(m).is_none()
    }

    /// Standard monomials of degree `0..=max`, grouped by degree.
    pub fn standard_monomials(&self, max: usize) -> Vec<Vec<Mono>> {
        let mut out = vec![Vec::new(); max + 1];
        fn rec(gb: &GroebnerBasis, m: &mut Vec<u16>, max: usize, out: &mut Vec<Vec<Mono>>) {
            let mono = Mono(m.clone());
            if !gb.is_standard(&mono) {
                return;
            }
            out[m.len()].push(mono);
            if m.len() == max {
                return;
            }
            let start = m.last().copied().unwrap_or(0);
            for v in start..gb.nvars as u16 {
                m.push(v);
                rec(gb, m, max, out);
                m.pop();
            }
        }
        rec(self, &mut Vec::new(), max, &mut out);
        for d in out.iter_mut() {
            d.sort();
        }
        out
    }
}

/// Gaussian elimination on homogeneous polynomials of one degree: returns
/// monic polynomials with distinct leading terms, each free of the others'
/// leading terms, in decreasing order of leading term.
///
/// Rows are kept fully reduced against each other as they arrive, which
/// keeps them sparse when most inputs are dependent.
fn interreduce(polys: Vec<Poly>) -> Vec<Poly> {
    let mut rows: BTreeMap<Mono, Poly> = BTreeMap::new();
    for mut p in polys {
        // Rows contain no pivot but their own, so one downward sweep clears
        // every pivot from `p`.
        let mut cursor: Option<Mono> = None;
        loop {
            let hit = match &cursor {
                Some(c) => p.range(..c.clone()).rev().find(|(m, _)| rows.contains_key(*m)),
                None => p.iter().rev().find(|(m, _)| rows.contains_key(*m)),
            }
            .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = hit else {
                break;
            };
            for (rm, rc) in &rows[&m] {
                add_term(&mut p, rm.clone(), -(&c * rc));
            }
            cursor = Some(m);
        }
        if p.is_empty() {
            continue;
        }
        let p = make_monic(p);
        let lt = p.keys().next_back().expect("nonzero").clone();
        for row in rows.values_mut() {
            if let Some(c) = row.get(&lt).cloned() {
                for (m, pc) in &p {
                    add_term(row, m.clone(), -(&c * pc));
                }
            }
        }
        rows.insert(lt, p);
    }
    rows.into_values().rev().collect()
}
