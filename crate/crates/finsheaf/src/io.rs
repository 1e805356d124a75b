//! Interchange formats: posets as JSON or relation text, sheaves and sheaf
//! complexes as JSON, simplicial complexes as facet files.
//!
//! Every format round-trips through its reader and writer. The JSON writers
//! emit deterministic output — element order follows the poset, map keys are
//! written in a fixed order — so repeated runs produce identical bytes.
//! Matrix entries and torsion orders that fit in an `i64` are written as
//! JSON numbers and anything larger as a decimal string; the readers accept
//! both.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::duality::DualizingModel;
use crate::poset::FinPoset;
use crate::sheaf::{FreeStalkSheaf, SheafComplex};
use crate::simplicial::SimplicialComplex;
use crate::zlinalg::{bigint_to_json_value, IntMatrix};
use crate::{Error, Result};

// --- posets ----------------------------------------------------------------------

/// `{"elements": [...], "covers": [["a","b"], ...]}` with elements in poset
/// order and covers as (lower, upper) label pairs.
pub fn poset_to_json(x: &FinPoset) -> Value {
    let elements: Vec<Value> = x.labels().iter().map(|l| json!(l)).collect();
    let covers: Vec<Value> = x
        .covers()
        .iter()
        .map(|&(a, b)| json!([x.label(a), x.label(b)]))
        .collect();
    json!({ "elements": elements, "covers": covers })
}

pub fn poset_from_json(v: &Value) -> Result<FinPoset> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("poset JSON must be an object".into()))?;
    let elements = obj
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("poset JSON needs an \"elements\" array".into()))?;
    let labels: Vec<String> = elements
        .iter()
        .map(|e| {
            e.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("element {e} is not a string")))
        })
        .collect::<Result<_>>()?;
    let mut lt: Vec<(String, String)> = Vec::new();
    if let Some(covers) = obj.get("covers") {
        let covers = covers
            .as_array()
            .ok_or_else(|| Error::Parse("\"covers\" must be an array of pairs".into()))?;
        for pair in covers {
            match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => match (a.as_str(), b.as_str()) {
                    (Some(a), Some(b)) => lt.push((a.to_string(), b.to_string())),
                    _ => return Err(Error::Parse(format!("cover {pair} is not a pair of labels"))),
                },
                _ => return Err(Error::Parse(format!("cover {pair} is not a pair of labels"))),
            }
        }
    }
    FinPoset::from_relations(&labels, &lt)
}

/// One line per cover relation, `a < b`; elements appearing in no relation
/// get a bare line of their own so the reader recovers them.
pub fn poset_to_text(x: &FinPoset) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut mentioned = vec![false; x.len()];
    for &(a, b) in x.covers() {
        mentioned[a] = true;
        mentioned[b] = true;
        lines.push(format!("{} < {}", x.label(a), x.label(b)));
    }
    for (i, seen) in mentioned.iter().enumerate() {
        if !seen {
            lines.push(x.label(i).to_string());
        }
    }
    lines.push(String::new());
    lines.join("\n")
}

/// Lines of `a < b` relations or bare element names; `#` starts a comment.
pub fn poset_from_text(s: &str) -> Result<FinPoset> {
    let mut labels: Vec<String> = Vec::new();
    let register = |l: &str, labels: &mut Vec<String>| {
        if !labels.iter().any(|k| k == l) {
            labels.push(l.to_string());
        }
    };
    let mut lt: Vec<(String, String)> = Vec::new();
    for raw in s.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('<').map(str::trim).collect();
        match parts.as_slice() {
            [one] => register(one, &mut labels),
            [a, b] => {
                if a.is_empty() || b.is_empty() {
                    return Err(Error::Parse(format!("malformed relation line {raw:?}")));
                }
                register(a, &mut labels);
                register(b, &mut labels);
                lt.push((a.to_string(), b.to_string()));
            }
            _ => return Err(Error::Parse(format!("expected `a < b`, got {raw:?}"))),
        }
    }
    if labels.is_empty() {
        return Err(Error::Parse("no elements in poset text".into()));
    }
    FinPoset::from_relations(&labels, &lt)
}

/// Accept either format: JSON when the first non-blank byte is `{`,
/// relation text otherwise.
pub fn parse_poset(s: &str) -> Result<FinPoset> {
    if s.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        poset_from_json(&v)
    } else {
        poset_from_text(s)
    }
}

pub fn load_poset(path: &Path) -> Result<FinPoset> {
    parse_poset(&read(path)?)
}

// --- sheaves ---------------------------------------------------------------------

fn matrix_to_json(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| Value::Array((0..m.cols()).map(|c| bigint_to_json_value(m.get(r, c))).collect()))
        .collect();
    Value::Array(rows)
}

fn entry_from_json(v: &Value) -> Result<BigInt> {
    if let Some(n) = v.as_i64() {
        return Ok(BigInt::from(n));
    }
    if let Some(s) = v.as_str() {
        return s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
    }
    Err(Error::Parse(format!("matrix entry {v} is not an integer")))
}

fn matrix_from_json(v: &Value, rows: usize, cols: usize) -> Result<IntMatrix> {
    let data = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    if data.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rows, got {}", data.len())));
    }
    let mut m = IntMatrix::zeros(rows, cols);
    for (r, row) in data.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {r} is not an array")))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("row {r} has {} entries, expected {cols}", row.len())));
        }
        for (c, entry) in row.iter().enumerate() {
            m.set(r, c, entry_from_json(entry)?);
        }
    }
    Ok(m)
}

/// `{"poset": ..., "stalk_ranks": {label: n}, "cover_maps": {"x->y": rows}}`
/// with the poset inlined, zero ranks omitted, and each map written as the
/// row-major matrix sending the stalk at `x` into the stalk at `y`.
pub fn sheaf_to_json(f: &FreeStalkSheaf) -> Value {
    let poset = f.poset();
    let mut ranks = Map::new();
    for x in 0..poset.len() {
        if f.rank(x) > 0 {
            ranks.insert(poset.label(x).to_string(), json!(f.rank(x)));
        }
    }
    let mut maps = Map::new();
    for (k, &(a, b)) in poset.covers().iter().enumerate() {
        if f.rank(a) > 0 && f.rank(b) > 0 {
            maps.insert(
                format!("{}->{}", poset.label(a), poset.label(b)),
                matrix_to_json(f.cover_map(k)),
            );
        }
    }
    json!({ "poset": poset_to_json(poset), "stalk_ranks": ranks, "cover_maps": maps })
}

/// Read a sheaf; `"poset"` may be inline JSON or a path to a poset file,
/// resolved relative to `base`. Unmentioned stalks default to rank zero and
/// unmentioned maps between nonzero stalks default to the zero map.
pub fn sheaf_from_json(v: &Value, base: Option<&Path>) -> Result<FreeStalkSheaf> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("sheaf JSON must be an object".into()))?;
    let poset = match obj.get("poset") {
        Some(Value::String(path)) => {
            let rel = Path::new(path);
            let resolved = match (rel.is_relative(), base) {
                (true, Some(dir)) => dir.join(rel),
                _ => rel.to_path_buf(),
            };
            load_poset(&resolved)?
        }
        Some(inline) => poset_from_json(inline)?,
        None => return Err(Error::Parse("sheaf JSON needs a \"poset\"".into())),
    };
    let poset = Arc::new(poset);
    let mut ranks = vec![0usize; poset.len()];
    if let Some(given) = obj.get("stalk_ranks") {
        let given = given
            .as_object()
            .ok_or_else(|| Error::Parse("\"stalk_ranks\" must be an object".into()))?;
        for (label, n) in given {
            let x = poset.index_of(label)?;
            ranks[x] = n
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("rank of {label} is not a number")))?
                as usize;
        }
    }
    let mut maps: Vec<IntMatrix> = Vec::with_capacity(poset.covers().len());
    let given = match obj.get("cover_maps") {
        Some(m) => Some(
            m.as_object()
                .ok_or_else(|| Error::Parse("\"cover_maps\" must be an object".into()))?,
        ),
        None => None,
    };
    let mut used: Vec<&String> = Vec::new();
    for &(a, b) in poset.covers() {
        let key = format!("{}->{}", poset.label(a), poset.label(b));
        let m = match given.and_then(|g| g.get_key_value(&key)) {
            Some((k, v)) => {
                used.push(k);
                matrix_from_json(v, ranks[b], ranks[a])?
            }
            None => IntMatrix::zeros(ranks[b], ranks[a]),
        };
        maps.push(m);
    }
    if let Some(g) = given {
        if let Some(stray) = g.keys().find(|k| !used.contains(k)) {
            return Err(Error::Parse(format!("\"{stray}\" does not name a cover relation")));
        }
    }
    FreeStalkSheaf::new(poset, ranks, maps)
}

pub fn load_sheaf(path: &Path) -> Result<FreeStalkSheaf> {
    let v: Value =
        serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    sheaf_from_json(&v, path.parent())
}

// --- sheaf complexes -------------------------------------------------------------

/// `{"lo": d, "poset": ..., "terms": [...], "differentials": [...]}`: one
/// term object (`stalk_ranks` + `cover_maps`) per degree, and one map per
/// degree-and-point, keyed by point label, from degree `lo + i` to the next.
pub fn complex_to_json(c: &SheafComplex) -> Value {
    let poset = c.poset();
    let mut terms: Vec<Value> = Vec::new();
    let mut diffs: Vec<Value> = Vec::new();
    for d in c.lo()..=c.hi() {
        let term = c.term(d).expect("degrees within lo..=hi are present");
        let mut t = sheaf_to_json(term);
        t.as_object_mut().expect("sheaf json is an object").remove("poset");
        terms.push(t);
        if d < c.hi() {
            let mut per_point = Map::new();
            for x in 0..poset.len() {
                let m = c.differential(d, x);
                if m.rows() > 0 && m.cols() > 0 {
                    per_point.insert(poset.label(x).to_string(), matrix_to_json(&m));
                }
            }
            diffs.push(Value::Object(per_point));
        }
    }
    json!({
        "lo": c.lo(),
        "poset": poset_to_json(poset),
        "terms": terms,
        "differentials": diffs,
    })
}

/// A dualizing model in complex form plus the chain annotation: for each
/// degree, the strictly increasing chains (as label lists) whose
/// closure-supported sheaves span that term, in the term's summand order.
pub fn model_to_json(m: &DualizingModel) -> Value {
    let c = m.complex();
    let poset = c.poset();
    let mut v = complex_to_json(c);
    let mut chains = Map::new();
    for d in c.lo()..=c.hi() {
        let at: Vec<Value> = m
            .chains_at(d)
            .iter()
            .map(|chain| Value::Array(chain.iter().map(|&x| json!(poset.label(x))).collect()))
            .collect();
        chains.insert(d.to_string(), Value::Array(at));
    }
    v.as_object_mut()
        .expect("complex json is an object")
        .insert("chains".into(), Value::Object(chains));
    v
}

// --- simplicial complexes --------------------------------------------------------

/// One facet per line, vertex labels separated by whitespace; `#` starts a
/// comment; blank lines are skipped.
pub fn facets_from_text(s: &str) -> Result<Vec<Vec<String>>> {
    let mut facets: Vec<Vec<String>> = Vec::new();
    for raw in s.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        facets.push(line.split_whitespace().map(str::to_string).collect());
    }
    if facets.is_empty() {
        return Err(Error::Parse("no facets in input".into()));
    }
    Ok(facets)
}

pub fn facets_to_text(k: &SimplicialComplex) -> String {
    let mut lines: Vec<String> = k
        .facets()
        .iter()
        .map(|f| {
            f.iter().map(|&v| k.vertices()[v].as_str()).collect::<Vec<_>>().join(" ")
        })
        .collect();
    lines.push(String::new());
    lines.join("\n")
}

pub fn load_facets(path: &Path) -> Result<Vec<Vec<String>>> {
    facets_from_text(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Deterministic pretty form used by the command-line tool: two-space
/// indentation, keys in insertion order.
pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}
