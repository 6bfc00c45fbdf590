//! Text formats: edge lists, node maps, coordinate tables and result tables,
//! each optionally preceded by `# key: value` metadata lines.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use hspace_core::geo::{CoordinateSet, Metric};
use hspace_core::graph::LabeledGraph;
use hspace_core::{Graph, NodeIdMap};

use crate::error::{CliError, Result};

/// How to read an edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Lines starting with any of these (after leading whitespace) are skipped.
    pub comment_prefixes: Vec<String>,
    /// Field separator; `None` splits on runs of whitespace.
    pub delimiter: Option<char>,
    /// Reject labels that are not integers.
    pub numeric_only: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            comment_prefixes: vec!["%".into(), "#".into()],
            delimiter: None,
            numeric_only: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("no edges")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads an undirected simple graph. Direction is ignored, self-loops and
/// repeated edges are dropped, and columns after the first two are ignored.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: &ParseOptions) -> Result<LabeledGraph, ParseError> {
    let mut raw: Vec<(String, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || opts.comment_prefixes.iter().any(|p| trimmed.starts_with(p.as_str())) {
            continue;
        }
        let err = |message: String| ParseError::Line { line: i + 1, message };
        let mut fields: Vec<&str> = match opts.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if fields.len() < 2 {
            return Err(err(format!("expected two node labels, found {:?}", trimmed)));
        }
        fields.truncate(2);
        for f in &fields {
            if f.is_empty() {
                return Err(err("empty node label".into()));
            }
            if opts.numeric_only && f.parse::<i64>().is_err() {
                return Err(err(format!("node label {f:?} is not an integer")));
            }
        }
        raw.push((fields[0].to_string(), fields[1].to_string()));
    }
    let labels = NodeIdMap::from_labels(raw.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    let edges = raw.iter().map(|(a, b)| (labels.id(a).unwrap(), labels.id(b).unwrap()));
    let graph = Graph::from_edges(labels.len(), edges).expect("ids come from the label map");
    if graph.edge_count() == 0 {
        return Err(ParseError::Empty);
    }
    Ok(LabeledGraph { graph, labels })
}

/// Opens and parses an edge-list file.
pub fn read_edge_list(path: &Path, opts: &ParseOptions) -> Result<LabeledGraph> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_edge_list(BufReader::new(file), opts).map_err(|e| match e {
        ParseError::Line { line, message } => CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        },
        ParseError::Empty => CliError::Format(format!("{}: graph has no edges", path.display())),
        ParseError::Io(e) => CliError::io(path, e),
    })
}

/// Writes one `label label` line per edge, in edge order.
pub fn write_edge_list<W: Write>(mut w: W, g: &LabeledGraph, meta: Option<&Metadata>) -> io::Result<()> {
    if let Some(m) = meta {
        m.write_comments(&mut w)?;
    }
    for (u, v) in g.graph.edges() {
        writeln!(w, "{} {}", g.labels.label(u), g.labels.label(v))?;
    }
    w.flush()
}

/// Two-column CSV: original label, compact id.
pub fn write_node_map<W: Write>(mut w: W, labels: &NodeIdMap, meta: Option<&Metadata>) -> Result<()> {
    if let Some(m) = meta {
        m.write_comments(&mut w).map_err(|e| CliError::Format(e.to_string()))?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["label", "id"])?;
    for (i, l) in labels.labels().iter().enumerate() {
        out.write_record([l.as_str(), &i.to_string()])?;
    }
    out.flush().map_err(|e| CliError::Format(e.to_string()))
}

/// Run description written at the top of every output file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub command: String,
    /// Resolved settings, including the seed. Sorted by key.
    pub config: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        Metadata {
            command: command.to_string(),
            config,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("hspace {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
        ];
        out.extend(self.config.iter().map(|(k, v)| format!("{k}: {v}")));
        out
    }

    pub fn write_comments<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for l in self.lines() {
            writeln!(w, "# {l}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
        })
    }
}

/// Shortest decimal that round-trips; `NaN` and infinities spelled out.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// CSV table preceded by metadata comments.
pub fn write_table<W: Write>(mut w: W, meta: &Metadata, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    meta.write_comments(&mut w).map_err(|e| CliError::Format(e.to_string()))?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush().map_err(|e| CliError::Format(e.to_string()))
}

/// JSON object `{"meta": …, <body fields>}`, pretty-printed with a
/// trailing newline.
pub fn write_json<W: Write>(mut w: W, meta: &Metadata, body: serde_json::Value) -> Result<()> {
    let mut obj = serde_json::Map::new();
    obj.insert("meta".into(), meta.to_json());
    match body {
        serde_json::Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    serde_json::to_writer_pretty(&mut w, &serde_json::Value::Object(obj))?;
    writeln!(w).map_err(|e| CliError::Format(e.to_string()))?;
    w.flush().map_err(|e| CliError::Format(e.to_string()))
}

/// Writes node positions as `label,<columns…>`.
pub fn write_positions<'a, W, F>(
    w: W,
    meta: &Metadata,
    labels: &NodeIdMap,
    columns: &[String],
    position: F,
) -> Result<()>
where
    W: Write,
    F: Fn(u32) -> &'a [f64],
{
    let mut header = vec!["label".to_string()];
    header.extend(columns.iter().cloned());
    let rows: Vec<Vec<String>> = (0..labels.len() as u32)
        .map(|i| {
            let mut r = vec![labels.label(i).to_string()];
            r.extend(position(i).iter().map(|&x| fmt_f64(x)));
            r
        })
        .collect();
    write_table(w, meta, &header, &rows)
}

/// Reads `label,x1,…,xD` rows (a header row and `#` comments are
/// allowed) and returns the positions of the nodes in `labels`, in id
/// order.
pub fn read_coordinates(path: &Path, labels: &NodeIdMap, metric: Metric) -> Result<CoordinateSet> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        message,
    };
    let mut by_label: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut dim = None;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 2 {
            return Err(parse_err(line, "expected a label and at least one coordinate".into()));
        }
        let values: std::result::Result<Vec<f64>, _> = rec.iter().skip(1).map(str::parse::<f64>).collect();
        let values = match values {
            Ok(v) => v,
            Err(_) if k == 0 => continue, // header row
            Err(e) => return Err(parse_err(line, format!("bad coordinate: {e}"))),
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(parse_err(line, format!("expected {d} coordinates, found {}", values.len())))
            }
            _ => {}
        }
        if by_label.insert(rec[0].to_string(), values).is_some() {
            return Err(parse_err(line, format!("duplicate label {:?}", &rec[0])));
        }
    }
    let dim = dim.ok_or_else(|| CliError::Format(format!("{}: no coordinates", path.display())))?;
    let mut values = Vec::with_capacity(labels.len() * dim);
    for l in labels.labels() {
        let p = by_label
            .get(l)
            .ok_or_else(|| CliError::Format(format!("{}: missing coordinate for node {l:?}", path.display())))?;
        values.extend_from_slice(p);
    }
    CoordinateSet::new(dim, values, metric).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

/// Creates `path` for writing, or returns stdout when `path` is `None`.
pub fn create_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
