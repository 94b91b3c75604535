//! JSON codecs for every interchange type.
//!
//! Decoders report the JSON pointer of the first offending value; decoded
//! structures are then validated by their own constructors, so a document
//! that parses is always a valid value.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::chow::{ChowRing, RelationKind};
use crate::charts::{ChartPoint, ScaledCurveData};
use crate::degeneration::{LaurentFamily, LaurentPolynomial};
use crate::error::{Error, Result};
use crate::leveltrees::{marks_id, DualLevelTree, RootedTree};
use crate::partitions::{Partition, PartitionChain};
use crate::rational::{format_q, parse_q, ExtendedValue, Q};
use crate::strata::{CollisionPoset, StratificationPoset};

fn child(ptr: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{key}")
}

fn root_ptr(ptr: &str) -> &str {
    if ptr.is_empty() {
        "/"
    } else {
        ptr
    }
}

fn schema(ptr: &str, msg: impl Into<String>) -> Error {
    Error::schema(root_ptr(ptr), msg)
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(ptr, "expected a string"))
}

fn as_usize(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(ptr, "expected a non-negative integer"))
}

fn as_i32(v: &Value, ptr: &str) -> Result<i32> {
    v.as_i64()
        .and_then(|x| i32::try_from(x).ok())
        .ok_or_else(|| schema(ptr, "expected an integer exponent"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(ptr, format!("missing field {key:?}")))
}

fn no_extra_fields(obj: &Map<String, Value>, allowed: &[&str], ptr: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(&child(ptr, k), "unknown field")),
        None => Ok(()),
    }
}

/// Re-tags a validation failure of a decoded value with its location.
fn at<T>(ptr: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema { .. } => e,
        other => Error::schema(root_ptr(ptr), other.to_string()),
    })
}

fn as_q(v: &Value, ptr: &str) -> Result<Q> {
    at(ptr, parse_q(as_str(v, ptr)?))
}

fn as_pair(v: &Value, ptr: &str) -> Result<(usize, usize)> {
    let a = as_array(v, ptr)?;
    if a.len() != 2 {
        return Err(schema(ptr, "expected a pair [i, j]"));
    }
    Ok((as_usize(&a[0], &child(ptr, 0))?, as_usize(&a[1], &child(ptr, 1))?))
}

/// Parses a document, mapping syntax errors to the root pointer.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("/", format!("malformed JSON: {e}")))
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- scalars

pub fn encode_q(v: &Q) -> Value {
    Value::String(format_q(v))
}

pub fn encode_extended(v: &ExtendedValue) -> Value {
    Value::String(v.to_json_string())
}

pub fn decode_extended(v: &Value, ptr: &str) -> Result<ExtendedValue> {
    match as_str(v, ptr)? {
        "inf" => Ok(ExtendedValue::Infinity),
        s => Ok(ExtendedValue::Finite(at(ptr, parse_q(s))?)),
    }
}

// ------------------------------------------------------- partitions/chains

pub fn encode_partition(p: &Partition) -> Value {
    json!(p.blocks())
}

/// Decodes `[[1,2],[3]]`; the ground set is the union of the blocks.
pub fn decode_partition(v: &Value, ptr: &str) -> Result<Partition> {
    let blocks = as_array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(b, block)| {
            let bp = child(ptr, b);
            as_array(block, &bp)?
                .iter()
                .enumerate()
                .map(|(k, x)| as_usize(x, &child(&bp, k)))
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = blocks.iter().map(Vec::len).sum();
    at(ptr, Partition::new(n, blocks))
}

pub fn encode_chain(c: &PartitionChain) -> Value {
    json!({
        "n": c.n(),
        "chain": c.elements().iter().map(encode_partition).collect::<Vec<_>>(),
    })
}

pub fn decode_chain(v: &Value, ptr: &str) -> Result<PartitionChain> {
    let obj = as_object(v, ptr)?;
    no_extra_fields(obj, &["n", "chain"], ptr)?;
    let n = as_usize(field(obj, "n", ptr)?, &child(ptr, "n"))?;
    let cp = child(ptr, "chain");
    let elements = as_array(field(obj, "chain", ptr)?, &cp)?
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let ep = child(&cp, k);
            let p = decode_partition(e, &ep)?;
            if p.n() != n {
                return Err(schema(&ep, format!("partition of {} marks in a chain with n = {n}", p.n())));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    at(ptr, PartitionChain::new(n, elements))
}

// ------------------------------------------------------------------ trees

fn encode_tree_parts(
    n: usize,
    ids: &[String],
    levels: Option<Vec<usize>>,
    edges: &[(usize, usize)],
    leaf_of: impl Fn(usize) -> usize,
) -> Value {
    let vertices: Vec<Value> = ids
        .iter()
        .enumerate()
        .map(|(v, id)| match &levels {
            Some(l) => json!({"id": id, "level": l[v]}),
            None => json!({"id": id}),
        })
        .collect();
    let marking: Map<String, Value> = (1..=n)
        .map(|i| (i.to_string(), Value::String(ids[leaf_of(i)].clone())))
        .collect();
    json!({
        "n": n,
        "vertices": vertices,
        "edges": edges.iter().map(|&(p, c)| json!([ids[p], ids[c]])).collect::<Vec<_>>(),
        "root": ids[0],
        "marking": marking,
    })
}

pub fn encode_tree(t: &DualLevelTree) -> Value {
    let ids: Vec<String> = (0..t.vertices().len()).map(|v| t.vertex_id(v)).collect();
    let levels = (0..t.vertices().len()).map(|v| t.level(v)).collect();
    encode_tree_parts(t.n(), &ids, Some(levels), &t.edges(), |i| t.terminal_of(i))
}

pub fn encode_rooted_tree(t: &RootedTree) -> Value {
    let ids: Vec<String> = (0..t.len()).map(|v| t.vertex_id(v)).collect();
    let edges: Vec<(usize, usize)> = (0..t.len()).filter_map(|v| t.parent(v).map(|p| (p, v))).collect();
    encode_tree_parts(t.n(), &ids, None, &edges, |i| t.leaf_of(i))
}

/// The pieces of a tree document: mark sets per vertex (derived from edges
/// and marking, then checked against the ids) and optional levels.
struct TreeDoc {
    n: usize,
    marks: Vec<Vec<usize>>,
    levels: Vec<Option<usize>>,
}

fn decode_tree_doc(v: &Value, ptr: &str) -> Result<TreeDoc> {
    let obj = as_object(v, ptr)?;
    no_extra_fields(obj, &["n", "vertices", "edges", "root", "marking"], ptr)?;
    let n = as_usize(field(obj, "n", ptr)?, &child(ptr, "n"))?;
    if n == 0 {
        return Err(schema(&child(ptr, "n"), "n must be positive"));
    }

    let vp = child(ptr, "vertices");
    let mut ids: Vec<String> = Vec::new();
    let mut levels = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (k, vert) in as_array(field(obj, "vertices", ptr)?, &vp)?.iter().enumerate() {
        let p = child(&vp, k);
        let o = as_object(vert, &p)?;
        no_extra_fields(o, &["id", "level"], &p)?;
        let id = as_str(field(o, "id", &p)?, &child(&p, "id"))?.to_string();
        let level = o.get("level").map(|l| as_usize(l, &child(&p, "level"))).transpose()?;
        if index.insert(id.clone(), k).is_some() {
            return Err(schema(&child(&p, "id"), format!("duplicate vertex id {id:?}")));
        }
        ids.push(id);
        levels.push(level);
    }
    if ids.is_empty() {
        return Err(schema(&vp, "a tree has at least one vertex"));
    }
    let lookup = |id: &Value, p: &str| -> Result<usize> {
        let s = as_str(id, p)?;
        index.get(s).copied().ok_or_else(|| schema(p, format!("unknown vertex id {s:?}")))
    };

    let ep = child(ptr, "edges");
    let mut parent: Vec<Option<usize>> = vec![None; ids.len()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (k, e) in as_array(field(obj, "edges", ptr)?, &ep)?.iter().enumerate() {
        let p = child(&ep, k);
        let a = as_array(e, &p)?;
        if a.len() != 2 {
            return Err(schema(&p, "an edge is a pair [parent, child]"));
        }
        let (u, w) = (lookup(&a[0], &child(&p, 0))?, lookup(&a[1], &child(&p, 1))?);
        if parent[w].replace(u).is_some() {
            return Err(schema(&p, format!("vertex {:?} has two parents", ids[w])));
        }
        children[u].push(w);
    }
    let rp = child(ptr, "root");
    let root = lookup(field(obj, "root", ptr)?, &rp)?;
    if parent[root].is_some() {
        return Err(schema(&rp, "the root has a parent"));
    }

    let mp = child(ptr, "marking");
    let marking = as_object(field(obj, "marking", ptr)?, &mp)?;
    let mut direct: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for i in 1..=n {
        let key = i.to_string();
        let v = marking
            .get(&key)
            .ok_or_else(|| schema(&mp, format!("mark {i} is not assigned to a vertex")))?;
        direct[lookup(v, &child(&mp, &key))?].push(i);
    }
    if let Some(k) = marking.keys().find(|k| k.parse::<usize>().map_or(true, |i| i == 0 || i > n)) {
        return Err(schema(&child(&mp, k), "not a mark of this tree"));
    }

    // Marks above each vertex, accumulated from the root; also detects cycles
    // and vertices unreachable from the root.
    let mut order = vec![root];
    let mut seen = vec![false; ids.len()];
    seen[root] = true;
    let mut k = 0;
    while k < order.len() {
        for &c in &children[order[k]] {
            if seen[c] {
                return Err(schema(&ep, "the edges do not form a tree"));
            }
            seen[c] = true;
            order.push(c);
        }
        k += 1;
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(schema(&child(&vp, v), "vertex is not reachable from the root"));
    }
    let mut marks = direct;
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            let m = marks[v].clone();
            marks[p].extend(m);
        }
    }
    for (v, m) in marks.iter_mut().enumerate() {
        m.sort_unstable();
        let expected = marks_id(n, m);
        if ids[v] != expected {
            return Err(schema(
                &child(&child(&vp, v), "id"),
                format!("id {:?} does not match the marks above it ({expected:?})", ids[v]),
            ));
        }
    }
    Ok(TreeDoc { n, marks, levels })
}

/// Decodes a leveled tree; every vertex needs a level.
pub fn decode_tree(v: &Value, ptr: &str) -> Result<DualLevelTree> {
    let doc = decode_tree_doc(v, ptr)?;
    let mut nodes = Vec::with_capacity(doc.marks.len());
    for (k, (m, l)) in doc.marks.into_iter().zip(doc.levels).enumerate() {
        let l = l.ok_or_else(|| schema(&child(&child(ptr, "vertices"), k), "missing field \"level\""))?;
        nodes.push((m, l));
    }
    at(ptr, DualLevelTree::from_nodes(doc.n, nodes))
}

/// Decodes an unleveled rooted tree; any levels present are ignored.
pub fn decode_rooted_tree(v: &Value, ptr: &str) -> Result<RootedTree> {
    let doc = decode_tree_doc(v, ptr)?;
    at(ptr, RootedTree::from_mark_sets(doc.n, doc.marks))
}

// ----------------------------------------------------------------- points

fn pair_key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

pub fn encode_point(p: &ChartPoint) -> Value {
    let z: Map<String, Value> = p
        .z_map()
        .iter()
        .map(|(&(i, j), v)| (pair_key(i, j), encode_q(v)))
        .collect();
    json!({
        "tree": encode_tree(p.tree()),
        "indices": p.indices().iter().map(|&(i, j)| json!([i, j])).collect::<Vec<_>>(),
        "z": z,
        "t": p.t_values().iter().map(encode_q).collect::<Vec<_>>(),
    })
}

/// Decodes and validates a chart point. Validation failures are reported as
/// they are, without a pointer, since they concern the point as a whole.
pub fn decode_point(v: &Value, ptr: &str) -> Result<ChartPoint> {
    let p = decode_point_unvalidated(v, ptr)?;
    p.validate()?;
    Ok(p)
}

/// Decodes the structure of a chart point without checking its equations.
pub fn decode_point_unvalidated(v: &Value, ptr: &str) -> Result<ChartPoint> {
    let obj = as_object(v, ptr)?;
    no_extra_fields(obj, &["tree", "indices", "z", "t"], ptr)?;
    let tree = decode_tree(field(obj, "tree", ptr)?, &child(ptr, "tree"))?;
    let ip = child(ptr, "indices");
    let indices = as_array(field(obj, "indices", ptr)?, &ip)?
        .iter()
        .enumerate()
        .map(|(k, e)| as_pair(e, &child(&ip, k)))
        .collect::<Result<Vec<_>>>()?;
    let zp = child(ptr, "z");
    let mut z = BTreeMap::new();
    for (key, val) in as_object(field(obj, "z", ptr)?, &zp)? {
        let kp = child(&zp, key);
        let pair = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .filter(|&(i, j)| i >= 1 && i < j && j <= tree.n())
            .ok_or_else(|| schema(&kp, "keys are \"i,j\" with 1 <= i < j <= n"))?;
        z.insert(pair, as_q(val, &kp)?);
    }
    let tp = child(ptr, "t");
    let t = as_array(field(obj, "t", ptr)?, &tp)?
        .iter()
        .enumerate()
        .map(|(k, e)| as_q(e, &child(&tp, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartPoint::unchecked(tree, indices, z, t))
}

pub fn encode_scaled_curve(x: &ScaledCurveData) -> Value {
    let periods: Map<String, Value> = x
        .periods
        .iter()
        .map(|(&(i, j), v)| (pair_key(i, j), encode_q(v)))
        .collect();
    json!({"tree": encode_rooted_tree(&x.tree), "periods": periods})
}

// --------------------------------------------------------------- families

pub fn encode_family(f: &LaurentFamily) -> Value {
    let z: Vec<Value> = f
        .components()
        .iter()
        .map(|p| Value::Array(p.terms().iter().map(|(e, c)| json!([e, format_q(c)])).collect()))
        .collect();
    json!({"n": f.n(), "z": z})
}

pub fn decode_family(v: &Value, ptr: &str) -> Result<LaurentFamily> {
    let obj = as_object(v, ptr)?;
    no_extra_fields(obj, &["n", "z"], ptr)?;
    let n = as_usize(field(obj, "n", ptr)?, &child(ptr, "n"))?;
    let zp = child(ptr, "z");
    let comps = as_array(field(obj, "z", ptr)?, &zp)?;
    if comps.len() != n {
        return Err(schema(&zp, format!("expected {n} polynomials, got {}", comps.len())));
    }
    let mut z = Vec::with_capacity(n);
    for (k, poly) in comps.iter().enumerate() {
        let pp = child(&zp, k);
        let mut terms = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (m, term) in as_array(poly, &pp)?.iter().enumerate() {
            let tp = child(&pp, m);
            let a = as_array(term, &tp)?;
            if a.len() != 2 {
                return Err(schema(&tp, "a term is [exponent, \"p/q\"]"));
            }
            let e = as_i32(&a[0], &child(&tp, 0))?;
            if !seen.insert(e) {
                return Err(schema(&child(&tp, 0), format!("exponent {e} appears twice")));
            }
            terms.push((e, as_q(&a[1], &child(&tp, 1))?));
        }
        z.push(LaurentPolynomial::new(terms));
    }
    at(ptr, LaurentFamily::new(z))
}

// ----------------------------------------------------------------- posets

pub fn encode_stratification(p: &StratificationPoset) -> Value {
    let nodes: Vec<Value> = p
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| json!({"id": k, "label": r.chain.label(), "chain": encode_chain(&r.chain), "codim": r.codim}))
        .collect();
    let mut grading: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, r) in p.records.iter().enumerate() {
        grading.entry(r.codim).or_default().push(k);
    }
    json!({
        "n": p.n,
        "nodes": nodes,
        "edges": p.covers.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "grading": grading.into_iter().map(|(c, ids)| json!({"codim": c, "nodes": ids})).collect::<Vec<_>>(),
    })
}

pub fn encode_collision_poset(p: &CollisionPoset) -> Value {
    let nodes: Vec<Value> = p
        .strata
        .iter()
        .zip(&p.dims)
        .enumerate()
        .map(|(k, (r, d))| json!({"id": k, "label": r.label(), "partition": encode_partition(r), "dim": d}))
        .collect();
    json!({
        "n": p.n,
        "nodes": nodes,
        "edges": p.covers.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn encode_schedule(n: usize, stages: &[(usize, Vec<Partition>)]) -> Value {
    let stages: Vec<Value> = stages
        .iter()
        .map(|(k, centers)| {
            json!({
                "stage": k,
                "dim": k,
                "centers": centers.iter().map(encode_partition).collect::<Vec<_>>(),
                "labels": centers.iter().map(Partition::label).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"n": n, "stages": stages})
}

// ------------------------------------------------------------------- chow

/// `{"n", "generators", "relations"?, "hilbert"?}`. Relation terms are
/// `[coefficient, [generator indices]]`, leading term first.
pub fn encode_chow(ring: &ChowRing, relations: bool, hilbert: bool) -> Value {
    let mut out = Map::new();
    out.insert("n".into(), json!(ring.n()));
    out.insert(
        "generators".into(),
        Value::Array(ring.generators().iter().map(encode_partition).collect()),
    );
    if relations {
        let rels: Vec<Value> = ring
            .relations()
            .iter()
            .map(|(kind, e)| {
                let terms: Vec<Value> = e
                    .terms()
                    .iter()
                    .rev()
                    .map(|(m, c)| json!([format_q(c), m.0]))
                    .collect();
                match kind {
                    RelationKind::Incomparable => json!({"kind": "incomparable", "terms": terms}),
                    RelationKind::Separated { pi, i, j } => {
                        json!({"kind": "separated", "generator": pi, "pair": [i, j], "terms": terms})
                    }
                }
            })
            .collect();
        out.insert("relations".into(), Value::Array(rels));
    }
    if hilbert {
        out.insert("hilbert".into(), json!(ring.hilbert()));
    }
    Value::Object(out)
}
