//! GraphML and JSON serialization of a laid-out, partitioned network.
//!
//! Output is deterministic: nodes in keyword order, edges in endpoint
//! order, floats printed in shortest round-trip form.

use std::fmt::Write as _;
use std::str::FromStr;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::{KeywordGraph, LayoutPositions, NetworkError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExportFormat {
    GraphMl,
    #[default]
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::GraphMl => "graphml",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = NetworkError;
    fn from_str(s: &str) -> Result<Self, NetworkError> {
        match s.to_ascii_lowercase().as_str() {
            "graphml" => Ok(ExportFormat::GraphMl),
            "json" => Ok(ExportFormat::Json),
            _ => Err(NetworkError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportNode {
    pub id: String,
    pub frequency: u32,
    pub community: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportEdge {
    pub source: String,
    pub target: String,
    pub weight: u32,
}

/// Serializable view of a network with communities and coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<ExportNode>,
    pub edges: Vec<ExportEdge>,
}

impl GraphDocument {
    pub fn new(
        graph: &KeywordGraph,
        partition: &[usize],
        positions: &LayoutPositions,
    ) -> Result<Self, NetworkError> {
        let n = graph.node_count();
        if partition.len() != n {
            return Err(NetworkError::PartitionSize {
                expected: n,
                got: partition.len(),
            });
        }
        if positions.len() != n {
            return Err(NetworkError::PositionsSize {
                expected: n,
                got: positions.len(),
            });
        }
        let names = graph.nodes();
        let nodes = (0..n)
            .map(|i| ExportNode {
                id: names[i].clone(),
                frequency: graph.frequencies()[i],
                community: partition[i],
                x: positions.coords[i].0,
                y: positions.coords[i].1,
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|&(a, b, w)| ExportEdge {
                source: names[a].clone(),
                target: names[b].clone(),
                weight: w,
            })
            .collect();
        Ok(GraphDocument { nodes, edges })
    }

    pub fn render(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("document serializes");
                s.push('\n');
                s
            }
            ExportFormat::GraphMl => self.to_graphml(),
        }
    }

    fn to_graphml(&self) -> String {
        let esc = |s: &str| quick_xml::escape::escape(s).into_owned();
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        for (id, domain, ty) in [
            ("frequency", "node", "int"),
            ("community", "node", "int"),
            ("x", "node", "double"),
            ("y", "node", "double"),
            ("weight", "edge", "int"),
        ] {
            let _ = writeln!(
                out,
                "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
            );
        }
        out.push_str("  <graph id=\"keywords\" edgedefault=\"undirected\">\n");
        for node in &self.nodes {
            let _ = writeln!(
                out,
                "    <node id=\"{}\"><data key=\"frequency\">{}</data><data key=\"community\">{}</data><data key=\"x\">{}</data><data key=\"y\">{}</data></node>",
                esc(&node.id),
                node.frequency,
                node.community,
                node.x,
                node.y
            );
        }
        for edge in &self.edges {
            let _ = writeln!(
                out,
                "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
                esc(&edge.source),
                esc(&edge.target),
                edge.weight
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

pub fn export_graph(
    graph: &KeywordGraph,
    partition: &[usize],
    positions: &LayoutPositions,
    format: ExportFormat,
) -> Result<String, NetworkError> {
    Ok(GraphDocument::new(graph, partition, positions)?.render(format))
}

/// Reads a document produced by [`export_graph`].
pub fn parse_graph(input: &str, format: ExportFormat) -> Result<GraphDocument, NetworkError> {
    match format {
        ExportFormat::Json => {
            serde_json::from_str(input).map_err(|e| NetworkError::Parse(e.to_string()))
        }
        ExportFormat::GraphMl => parse_graphml(input),
    }
}

enum Open {
    None,
    Node(ExportNode),
    Edge(ExportEdge),
}

fn parse_graphml(input: &str) -> Result<GraphDocument, NetworkError> {
    let err = |m: String| NetworkError::Parse(m);
    let mut reader = Reader::from_str(input);
    let mut doc = GraphDocument::default();
    let mut open = Open::None;
    let mut data_key: Option<String> = None;

    let attr = |e: &quick_xml::events::BytesStart, name: &[u8]| -> Result<String, NetworkError> {
        for a in e.attributes() {
            let a = a.map_err(|e| err(e.to_string()))?;
            if a.key.as_ref() == name {
                return a
                    .unescape_value()
                    .map(|v| v.into_owned())
                    .map_err(|e| err(e.to_string()));
            }
        }
        Err(err(format!(
            "missing attribute {}",
            String::from_utf8_lossy(name)
        )))
    };

    loop {
        match reader.read_event().map_err(|e| err(e.to_string()))? {
            Event::Start(e) => match e.name().as_ref() {
                b"node" => {
                    open = Open::Node(ExportNode {
                        id: attr(&e, b"id")?,
                        frequency: 0,
                        community: 0,
                        x: 0.0,
                        y: 0.0,
                    })
                }
                b"edge" => {
                    open = Open::Edge(ExportEdge {
                        source: attr(&e, b"source")?,
                        target: attr(&e, b"target")?,
                        weight: 0,
                    })
                }
                b"data" => data_key = Some(attr(&e, b"key")?),
                _ => {}
            },
            Event::Text(t) => {
                let Some(key) = data_key.as_deref() else {
                    continue;
                };
                let text = t.unescape().map_err(|e| err(e.to_string()))?;
                let text = text.trim();
                let bad = |_| err(format!("bad value {text:?} for {key}"));
                match (&mut open, key) {
                    (Open::Node(n), "frequency") => n.frequency = text.parse().map_err(bad)?,
                    (Open::Node(n), "community") => n.community = text.parse().map_err(bad)?,
                    (Open::Node(n), "x") => {
                        n.x = text.parse().map_err(|_| err(format!("bad x {text:?}")))?
                    }
                    (Open::Node(n), "y") => {
                        n.y = text.parse().map_err(|_| err(format!("bad y {text:?}")))?
                    }
                    (Open::Edge(e), "weight") => e.weight = text.parse().map_err(bad)?,
                    _ => {}
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => data_key = None,
                b"node" | b"edge" => match std::mem::replace(&mut open, Open::None) {
                    Open::Node(n) => doc.nodes.push(n),
                    Open::Edge(e) => doc.edges.push(e),
                    Open::None => {}
                },
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(doc)
}
