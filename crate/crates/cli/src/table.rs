//! Plain-text renderings for `--table`. For reading only; not a stable format.

use std::fmt::Write;

use multiscale::charts::{ChartPoint, ScaledCurveData};
use multiscale::chow::{describe_relation, ChowRing};
use multiscale::leveltrees::DualLevelTree;
use multiscale::partitions::{Partition, PartitionChain};
use multiscale::rational::format_q;
use multiscale::strata::StratificationPoset;

pub fn trees(trees: &[DualLevelTree]) -> String {
    let mut s = String::new();
    for (k, t) in trees.iter().enumerate() {
        writeln!(s, "{k:>4}  ell={}  {t}", t.ell()).unwrap();
    }
    s
}

pub fn chains(chains: &[PartitionChain]) -> String {
    let mut s = String::new();
    for (k, c) in chains.iter().enumerate() {
        writeln!(s, "{k:>4}  len={}  {}", c.len(), c.label()).unwrap();
    }
    s
}

pub fn strata(p: &StratificationPoset) -> String {
    let mut s = String::new();
    writeln!(s, "{:>4}  {:>5}  chain", "id", "codim").unwrap();
    for (k, r) in p.records.iter().enumerate() {
        writeln!(s, "{k:>4}  {:>5}  {}", r.codim, r.chain.label()).unwrap();
    }
    writeln!(s, "{} covers", p.covers.len()).unwrap();
    s
}

pub fn schedule(stages: &[(usize, Vec<Partition>)]) -> String {
    let mut s = String::new();
    for (k, centers) in stages {
        let labels: Vec<String> = centers.iter().map(Partition::label).collect();
        writeln!(s, "stage {k}: {}", labels.join(", ")).unwrap();
    }
    s
}

pub fn point(p: &ChartPoint) -> String {
    let mut s = String::new();
    writeln!(s, "tree: {}", p.tree()).unwrap();
    let idx: Vec<String> = p.indices().iter().map(|(i, j)| format!("({i},{j})")).collect();
    writeln!(s, "indices: {}", idx.join(" ")).unwrap();
    for ((i, j), v) in p.z_map() {
        writeln!(s, "z{i},{j} = {}", format_q(v)).unwrap();
    }
    for (m, v) in p.t_values().iter().enumerate() {
        writeln!(s, "t{} = {}", m + 1, format_q(v)).unwrap();
    }
    s
}

pub fn scaled_curve(x: &ScaledCurveData) -> String {
    let mut s = format!("tree: {}\n", x.tree);
    for ((i, j), v) in &x.periods {
        writeln!(s, "period({i},{j}) = {}", format_q(v)).unwrap();
    }
    s
}

pub fn chow(ring: &ChowRing, relations: bool, hilbert: bool) -> String {
    let names = ring.generator_names();
    let mut s = format!("n = {}\ngenerators: {}\n", ring.n(), names.join(", "));
    if relations {
        for (kind, e) in ring.relations() {
            writeln!(s, "{:<18} {}", describe_relation(kind, ring.generators()), e.render(&names)).unwrap();
        }
    }
    if hilbert {
        let h: Vec<String> = ring.hilbert().iter().map(ToString::to_string).collect();
        writeln!(s, "hilbert: {}", h.join(" ")).unwrap();
    }
    s
}
