//! File formats: graph TSV, events and assignments JSON Lines, params.json,
//! and the CSV tables written by inference. Every reader reports the file and
//! line of the first problem it meets.
//!
//! JSON files carry a top-level `schema_version`; JSON Lines files may start
//! with a header object holding it; CSV files start with `# schema_version=N`.
//! Readers reject any major version other than [`SCHEMA_VERSION`].

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{
    Dataset, EdgeGroupKey, EdgeGrouping, EdgeGroups, Event, GroupLabel, ModelParameters, Network, NodeId,
    ObservationWindow, Parent, Table,
};
use crate::sampler::{InferenceResult, TraceRow};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Non-empty lines with 1-based numbers.
fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn check_version(path: &Path, v: &Value) -> Result<()> {
    let ok = match v {
        Value::Number(n) => n.as_u64() == Some(u64::from(SCHEMA_VERSION)),
        Value::String(s) => s.split('.').next() == Some(&SCHEMA_VERSION.to_string()),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Schema {
            path: path.to_path_buf(),
            found: v.to_string(),
            expected: SCHEMA_VERSION,
        })
    }
}

/// Reads a `u<TAB>v` edge list ("v follows u"). Blank lines and `#` comments
/// are skipped.
pub fn read_graph(path: &Path) -> Result<Network> {
    let mut edges = Vec::new();
    for (no, line) in lines(path)? {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, no, "expected two tab-separated node ids"));
        }
        let id = |s: &str| s.parse::<NodeId>().map_err(|_| parse_err(path, no, format!("bad node id '{s}'")));
        edges.push((id(fields[0])?, id(fields[1])?, no));
    }
    let mut seen = HashMap::new();
    for &(u, v, no) in &edges {
        if let Some(first) = seen.insert((u, v), no) {
            return Err(parse_err(path, no, format!("duplicate edge {u} -> {v} (first on line {first})")));
        }
    }
    let pairs: Vec<(NodeId, NodeId)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    Network::from_edges(&pairs, [])
}

pub fn write_graph(path: &Path, network: &Network) -> Result<()> {
    let mut w = create(path)?;
    let mut out = String::new();
    for (u, v) in network.edge_ids() {
        out.push_str(&format!("{u}\t{v}\n"));
    }
    w.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// One token per line; the line index is the token id.
pub fn read_vocabulary(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

/// Reads events JSON Lines. Keys: `id`, `time`, `user`, `words` (token ids, or
/// strings when `vocabulary` is given), optional `topic` and `parent` (event id,
/// or `null` for spontaneous; absent means unlabeled). An optional first-line
/// header `{"schema_version":1,"start":..,"horizon":..}` fixes the window;
/// otherwise `window` must be supplied or it is taken as `[min(0, first time),
/// last time + 1)`.
pub fn read_events<F: Scalar>(
    path: &Path,
    network: &Network,
    vocabulary: Option<&[String]>,
    window: Option<ObservationWindow<F>>,
) -> Result<Dataset<F>> {
    let index: Option<HashMap<&str, u32>> =
        vocabulary.map(|v| v.iter().enumerate().map(|(i, w)| (w.as_str(), i as u32)).collect());
    let mut events = Vec::new();
    let mut header_window = None;
    let mut ids = HashMap::new();
    for (k, (no, line)) in lines(path)?.into_iter().enumerate() {
        let value: Value = serde_json::from_str(&line).map_err(|e| parse_err(path, no, e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(parse_err(path, no, "expected a JSON object"));
        };
        if let Some(v) = obj.get("schema_version") {
            check_version(path, v).map_err(|_| parse_err(path, no, format!("unsupported schema_version {v}")))?;
        }
        if !obj.contains_key("id") {
            if k != 0 || !obj.contains_key("schema_version") {
                return Err(parse_err(path, no, "missing key 'id'"));
            }
            if let (Some(s), Some(h)) = (obj.get("start"), obj.get("horizon")) {
                let (s, h) = (num(path, no, "start", s)?, num(path, no, "horizon", h)?);
                header_window = Some(ObservationWindow::new(F::of(s), F::of(h)).map_err(|e| parse_err(path, no, e.to_string()))?);
            }
            continue;
        }
        let event: Event<F> = event_from_json(path, no, &obj, network, index.as_ref())?;
        if let Some(first) = ids.insert(event.id, no) {
            return Err(parse_err(path, no, format!("duplicate event id {} (first on line {first})", event.id)));
        }
        events.push((no, event));
    }
    let window = match window.or(header_window) {
        Some(w) => w,
        None => {
            let lo = events.iter().map(|(_, e)| e.time.as_f64()).fold(0.0, f64::min);
            let hi = events.iter().map(|(_, e)| e.time.as_f64()).fold(lo, f64::max);
            ObservationWindow::new(F::of(lo), F::of(hi + 1.0))?
        }
    };
    for (no, e) in &events {
        if !window.contains(e.time) {
            return Err(parse_err(
                path,
                *no,
                format!("time {} outside window [{}, {})", e.time, window.start, window.horizon),
            ));
        }
    }
    let times: HashMap<u64, (F, NodeId)> = events.iter().map(|(_, e)| (e.id, (e.time, e.node))).collect();
    for (no, e) in &events {
        if let Some(Parent::Event(p)) = e.parent {
            let &(t, u) = times
                .get(&p)
                .ok_or_else(|| parse_err(path, *no, format!("parent {p} not in the file")))?;
            if !(t < e.time) {
                return Err(parse_err(path, *no, format!("parent {p} is not earlier than event {}", e.id)));
            }
            if network.edge_between(u, e.node).is_err() {
                return Err(parse_err(path, *no, format!("no edge {u} -> {} for parent {p}", e.node)));
            }
        }
    }
    let mut d = Dataset::new(network.clone(), window, events.into_iter().map(|(_, e)| e).collect());
    if let Some(v) = vocabulary {
        d = d.with_vocabulary(v.to_vec());
    }
    Ok(d)
}

fn num(path: &Path, no: usize, key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_err(path, no, format!("'{key}' must be a finite number")))
}

fn uint(path: &Path, no: usize, key: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| parse_err(path, no, format!("'{key}' must be a nonnegative integer")))
}

fn event_from_json<F: Scalar>(
    path: &Path,
    no: usize,
    obj: &Map<String, Value>,
    network: &Network,
    vocabulary: Option<&HashMap<&str, u32>>,
) -> Result<Event<F>> {
    let get = |key: &str| obj.get(key).ok_or_else(|| parse_err(path, no, format!("missing key '{key}'")));
    let id = uint(path, no, "id", get("id")?)?;
    let time = num(path, no, "time", get("time")?)?;
    let node = uint(path, no, "user", get("user")?)?;
    if network.dense(node).is_none() {
        return Err(parse_err(path, no, format!("user {node} is not in the graph")));
    }
    let Value::Array(words) = get("words")? else {
        return Err(parse_err(path, no, "'words' must be an array"));
    };
    let mut tokens = Vec::with_capacity(words.len());
    for w in words {
        let tok = match (w, vocabulary) {
            (Value::String(s), Some(index)) => *index
                .get(s.as_str())
                .ok_or_else(|| parse_err(path, no, format!("word '{s}' not in the vocabulary")))?,
            (Value::String(s), None) => {
                return Err(parse_err(path, no, format!("word '{s}' given as a string but no vocabulary was supplied")))
            }
            (v, _) => {
                let t = uint(path, no, "words", v)?;
                if let Some(index) = vocabulary {
                    if t as usize >= index.len() {
                        return Err(parse_err(path, no, format!("token {t} outside the vocabulary")));
                    }
                }
                u32::try_from(t).map_err(|_| parse_err(path, no, "token id too large"))?
            }
        };
        tokens.push(tok);
    }
    let topic = match obj.get("topic") {
        None | Some(Value::Null) => None,
        Some(v) => Some(uint(path, no, "topic", v)? as usize),
    };
    let parent = match obj.get("parent") {
        None => None,
        Some(Value::Null) => Some(Parent::Spontaneous),
        Some(v) => Some(Parent::Event(uint(path, no, "parent", v)?)),
    };
    Ok(Event {
        id,
        time: F::of(time),
        node,
        tokens,
        topic,
        parent,
    })
}

fn parent_json(p: Option<Parent>) -> Option<Value> {
    p.map(|p| match p {
        Parent::Spontaneous => Value::Null,
        Parent::Event(id) => json!(id),
    })
}

fn write_lines(path: &Path, rows: impl IntoIterator<Item = Value>) -> Result<()> {
    let mut w = create(path)?;
    for row in rows {
        serde_json::to_writer(&mut w, &row).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes events with a window header. Gold `topic`/`parent` are written when
/// set; words are strings when the dataset has a vocabulary.
pub fn write_events<F: Scalar>(path: &Path, dataset: &Dataset<F>) -> Result<()> {
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "start": dataset.window.start.as_f64(),
        "horizon": dataset.window.horizon.as_f64(),
    });
    let rows = dataset.events().iter().map(|e| {
        let mut o = Map::new();
        o.insert("id".into(), json!(e.id));
        o.insert("time".into(), json!(e.time.as_f64()));
        o.insert("user".into(), json!(e.node));
        let words: Value = match &dataset.vocabulary {
            Some(v) => e.tokens.iter().map(|&t| Value::String(v[t as usize].clone())).collect(),
            None => json!(e.tokens),
        };
        o.insert("words".into(), words);
        if let Some(k) = e.topic {
            o.insert("topic".into(), json!(k));
        }
        if let Some(p) = parent_json(e.parent) {
            o.insert("parent".into(), p);
        }
        Value::Object(o)
    });
    write_lines(path, std::iter::once(header).chain(rows))
}

/// One event's inferred labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<F = f64> {
    pub id: u64,
    pub topic: usize,
    pub parent: Parent,
    pub ranked: Vec<(Parent, F)>,
}

pub fn write_assignments<F: Scalar>(path: &Path, dataset: &Dataset<F>, result: &InferenceResult<F>) -> Result<()> {
    let header = json!({"schema_version": SCHEMA_VERSION, "mode": result.mode.to_string()});
    let rows = dataset.events().iter().enumerate().map(|(i, e)| {
        let ranked: Vec<Value> = result.ranked_parents[i]
            .iter()
            .map(|&(p, s)| json!([parent_json(Some(p)), s.as_f64()]))
            .collect();
        json!({
            "id": e.id,
            "topic": result.topics[i],
            "parent": parent_json(Some(result.parents[i])),
            "ranked": ranked,
        })
    });
    write_lines(path, std::iter::once(header).chain(rows))
}

fn parent_from(path: &Path, no: usize, v: &Value) -> Result<Parent> {
    match v {
        Value::Null => Ok(Parent::Spontaneous),
        v => Ok(Parent::Event(uint(path, no, "parent", v)?)),
    }
}

pub fn read_assignments<F: Scalar>(path: &Path) -> Result<Vec<Assignment<F>>> {
    let mut out = Vec::new();
    for (k, (no, line)) in lines(path)?.into_iter().enumerate() {
        let value: Value = serde_json::from_str(&line).map_err(|e| parse_err(path, no, e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(parse_err(path, no, "expected a JSON object"));
        };
        if let Some(v) = obj.get("schema_version") {
            check_version(path, v).map_err(|_| parse_err(path, no, format!("unsupported schema_version {v}")))?;
            if k == 0 && !obj.contains_key("id") {
                continue;
            }
        }
        let get = |key: &str| obj.get(key).ok_or_else(|| parse_err(path, no, format!("missing key '{key}'")));
        let id = uint(path, no, "id", get("id")?)?;
        let topic = uint(path, no, "topic", get("topic")?)? as usize;
        let parent = parent_from(path, no, get("parent")?)?;
        let mut ranked = Vec::new();
        if let Some(Value::Array(items)) = obj.get("ranked") {
            for item in items {
                match item.as_array().map(Vec::as_slice) {
                    Some([p, s]) => ranked.push((parent_from(path, no, p)?, F::of(num(path, no, "ranked", s)?))),
                    _ => return Err(parse_err(path, no, "'ranked' entries must be [parent, score]")),
                }
            }
        }
        out.push(Assignment { id, topic, parent, ranked });
    }
    Ok(out)
}

/// Orders assignments like the dataset's events.
pub fn align_assignments<F: Scalar, S: Clone>(dataset: &Dataset<F>, assignments: &[Assignment<S>]) -> Result<Vec<Assignment<S>>> {
    let by_id: HashMap<u64, &Assignment<S>> = assignments.iter().map(|a| (a.id, a)).collect();
    dataset
        .events()
        .iter()
        .map(|e| {
            by_id
                .get(&e.id)
                .map(|a| (*a).clone())
                .ok_or_else(|| Error::invalid(format!("no assignment for event {}", e.id)))
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsFile {
    schema_version: Value,
    grouping: EdgeGrouping,
    nodes: Vec<NodeId>,
    mu: Vec<f64>,
    /// `[src, dst, w]` per edge, resolved through the groups.
    edges: Vec<(NodeId, NodeId, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    w_groups: Vec<GroupEntry>,
    zeta: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    trans: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupEntry {
    out_deg: usize,
    in_deg: usize,
    w: f64,
}

fn table_f64<F: Scalar>(t: &Table<F>) -> Vec<Vec<f64>> {
    t.iter_rows().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect()
}

fn table_from<F: Scalar>(path: &Path, name: &str, rows: Vec<Vec<f64>>, cols: Option<usize>) -> Result<Table<F>> {
    if rows.is_empty() {
        return Ok(Table::filled(0, cols.unwrap_or(0), F::zero()));
    }
    let t = Table::from_rows(rows.into_iter().map(|r| r.into_iter().map(F::of).collect()).collect())
        .map_err(|_| parse_err(path, 1, format!("'{name}' rows have unequal lengths")))?;
    if cols.is_some_and(|c| c != t.cols()) {
        return Err(parse_err(path, 1, format!("'{name}' has {} columns, expected {}", t.cols(), cols.unwrap_or(0))));
    }
    Ok(t)
}

/// Writes parameters with the network they live on, so the file is self-contained.
pub fn write_params<F: Scalar>(path: &Path, network: &Network, params: &ModelParameters<F>) -> Result<()> {
    let edges = network
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| (network.node_id(u), network.node_id(v), params.edge_strength(e).as_f64()))
        .collect();
    let w_groups = match params.groups.grouping() {
        EdgeGrouping::PerEdge => Vec::new(),
        EdgeGrouping::Degree => (0..params.groups.len())
            .map(|g| {
                let (out_deg, in_deg) = params.groups.label(g).degree_columns(network);
                GroupEntry {
                    out_deg,
                    in_deg,
                    w: params.w[g].as_f64(),
                }
            })
            .collect(),
    };
    let file = ParamsFile {
        schema_version: json!(SCHEMA_VERSION),
        grouping: params.groups.grouping(),
        nodes: network.node_ids().to_vec(),
        mu: params.mu.iter().map(|x| x.as_f64()).collect(),
        edges,
        w_groups,
        zeta: table_f64(&params.zeta),
        phi: table_f64(&params.phi),
        trans: table_f64(&params.trans),
    };
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &file).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a params.json and the network recorded in it.
pub fn read_params<F: Scalar>(path: &Path) -> Result<(Network, ModelParameters<F>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    let version = raw.get("schema_version").cloned().unwrap_or(Value::Null);
    check_version(path, &version)?;
    let file: ParamsFile = serde_json::from_value(raw).map_err(|e| parse_err(path, 1, e.to_string()))?;
    let pairs: Vec<(NodeId, NodeId)> = file.edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let network = Network::from_edges(&pairs, file.nodes.iter().copied()).map_err(|e| parse_err(path, 1, e.to_string()))?;
    if network.node_count() != file.nodes.len() || file.mu.len() != file.nodes.len() {
        return Err(parse_err(path, 1, "'mu' must list one rate per node"));
    }
    // mu follows the file's node order; map it to dense order
    let mut mu = vec![F::zero(); network.node_count()];
    for (&id, &m) in file.nodes.iter().zip(&file.mu) {
        mu[network.dense(id).expect("node was inserted")] = F::of(m);
    }
    let groups = EdgeGroups::new(&network, file.grouping);
    let mut w: Vec<Option<F>> = vec![None; groups.len()];
    match file.grouping {
        EdgeGrouping::PerEdge => {
            for &(u, v, x) in &file.edges {
                let e = network.edge_between(u, v).expect("edge was inserted");
                w[groups.group_of(e)] = Some(F::of(x));
            }
        }
        EdgeGrouping::Degree => {
            for entry in &file.w_groups {
                let label = GroupLabel::Degree(EdgeGroupKey {
                    source_out_degree: entry.out_deg,
                    dest_in_degree: entry.in_deg,
                });
                let g = groups.find(&label).ok_or_else(|| {
                    parse_err(path, 1, format!("w_groups entry ({}, {}) matches no edge", entry.out_deg, entry.in_deg))
                })?;
                w[g] = Some(F::of(entry.w));
            }
        }
    }
    let w: Vec<F> = w
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| parse_err(path, 1, "some edge group has no strength"))?;
    let trans: Table<F> = table_from(path, "trans", file.trans, None)?;
    let k = trans.rows();
    let params = ModelParameters {
        mu,
        groups,
        w,
        zeta: table_from(path, "zeta", file.zeta, None)?,
        phi: table_from(path, "phi", file.phi, Some(k))?,
        trans,
    };
    if params.phi.rows() != network.node_count() || params.zeta.rows() != k || params.trans.cols() != k {
        return Err(parse_err(path, 1, "matrix shapes do not match K and the node count"));
    }
    Ok((network, params))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a `# schema_version=` line, then `header`, then `rows`.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = create(path)?;
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per strength group: `out_deg,in_deg,N_pairs,N_source,exposure,w_hat,src,dst`.
/// `N_source` counts events at the member edges' source nodes; `src`/`dst` are
/// filled for per-edge groups.
pub fn write_w_groups<F: Scalar>(path: &Path, dataset: &Dataset<F>, result: &InferenceResult<F>) -> Result<()> {
    let net = &dataset.network;
    let mut per_node = vec![0u64; net.node_count()];
    for i in 0..dataset.len() {
        per_node[dataset.node_of(i)] += 1;
    }
    let rows = (0..result.groups.len()).map(|g| {
        let label = result.groups.label(g);
        let (od, id) = label.degree_columns(net);
        let n_source: u64 = result.groups.members(g).iter().map(|&e| per_node[net.edges()[e].0]).sum();
        let (src, dst) = match label {
            GroupLabel::Edge { src, dst } => (src.to_string(), dst.to_string()),
            GroupLabel::Degree(_) => (String::new(), String::new()),
        };
        format!(
            "{od},{id},{},{n_source},{},{},{src},{dst}",
            result.edge_pairs[g],
            csv_float(result.exposure[g].as_f64()),
            csv_float(result.w[g].as_f64())
        )
    });
    write_csv(path, "out_deg,in_deg,N_pairs,N_source,exposure,w_hat,src,dst", rows)
}

pub fn write_trace(path: &Path, trace: &[TraceRow]) -> Result<()> {
    let rows = trace
        .iter()
        .map(|r| format!("{},{},{}", r.iter, csv_float(r.joint_ll), csv_float(r.seconds)));
    write_csv(path, "iter,joint_ll,seconds", rows)
}

/// Numbered CSV fields, one entry per data line.
pub type CsvRows = Vec<(usize, Vec<String>)>;

/// Header and data lines of a CSV written by this module, after checking its version line.
pub fn read_csv_rows(path: &Path) -> Result<(Vec<String>, CsvRows)> {
    let all = lines(path)?;
    let mut it = all.into_iter();
    let (no, first) = it.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let version = first
        .strip_prefix("# schema_version=")
        .ok_or_else(|| parse_err(path, no, "missing '# schema_version=' line"))?;
    check_version(path, &Value::String(version.trim().to_string()))?;
    let (_, header) = it.next().ok_or_else(|| parse_err(path, no + 1, "missing header"))?;
    let header: Vec<String> = header.split(',').map(str::to_string).collect();
    let rows = it
        .map(|(no, l)| (no, l.split(',').map(str::to_string).collect::<Vec<_>>()))
        .collect::<Vec<_>>();
    for (no, r) in &rows {
        if r.len() != header.len() {
            return Err(parse_err(path, *no, format!("expected {} fields, found {}", header.len(), r.len())));
        }
    }
    Ok((header, rows))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// `dir/name` as a path.
pub fn join(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
