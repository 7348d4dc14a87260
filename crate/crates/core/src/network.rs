//! Directed acyclic coded networks: sources, intermediates, terminals,
//! unit-capacity edges, and message demands.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("network contains a cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid network: {0}")]
    Invalid(String),
}

/// Name of a source process.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MessageId(String);

impl MessageId {
    pub fn new(name: impl Into<String>) -> Self {
        MessageId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MessageId {
    fn from(s: &str) -> Self {
        MessageId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Intermediate,
    Terminal,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Intermediate => "intermediate",
            Role::Terminal => "terminal",
        })
    }
}

/// Role plus the message a source generates or a terminal demands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Source(MessageId),
    Intermediate,
    Terminal(MessageId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetNode {
    pub id: String,
    pub kind: NodeKind,
}

impl NetNode {
    pub fn source(id: impl Into<String>, generates: impl Into<MessageId>) -> Self {
        NetNode {
            id: id.into(),
            kind: NodeKind::Source(generates.into()),
        }
    }

    pub fn intermediate(id: impl Into<String>) -> Self {
        NetNode {
            id: id.into(),
            kind: NodeKind::Intermediate,
        }
    }

    pub fn terminal(id: impl Into<String>, demands: impl Into<MessageId>) -> Self {
        NetNode {
            id: id.into(),
            kind: NodeKind::Terminal(demands.into()),
        }
    }

    pub fn role(&self) -> Role {
        match self.kind {
            NodeKind::Source(_) => Role::Source,
            NodeKind::Intermediate => Role::Intermediate,
            NodeKind::Terminal(_) => Role::Terminal,
        }
    }

    pub fn generates(&self) -> Option<&MessageId> {
        match &self.kind {
            NodeKind::Source(m) => Some(m),
            _ => None,
        }
    }

    pub fn demands(&self) -> Option<&MessageId> {
        match &self.kind {
            NodeKind::Terminal(m) => Some(m),
            _ => None,
        }
    }
}

impl From<String> for MessageId {
    fn from(s: String) -> Self {
        MessageId(s)
    }
}

impl From<&String> for MessageId {
    fn from(s: &String) -> Self {
        MessageId(s.clone())
    }
}

impl From<&MessageId> for MessageId {
    fn from(m: &MessageId) -> Self {
        m.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetEdge {
    pub id: String,
    pub tail: String,
    pub head: String,
}

impl NetEdge {
    /// Edge with the default id `"<tail>-><head>"`.
    pub fn new(tail: impl Into<String>, head: impl Into<String>) -> Self {
        let (tail, head) = (tail.into(), head.into());
        NetEdge {
            id: format!("{tail}->{head}"),
            tail,
            head,
        }
    }

    pub fn named(id: impl Into<String>, tail: impl Into<String>, head: impl Into<String>) -> Self {
        NetEdge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
        }
    }
}

/// A network `G(V, E)` with its message set. Nodes, edges and messages are
/// kept sorted by id so that structurally equal networks compare equal and
/// serialize identically.
#[derive(Clone)]
pub struct CodedNetwork {
    name: String,
    messages: Vec<MessageId>,
    nodes: Vec<NetNode>,
    edges: Vec<NetEdge>,
    node_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl PartialEq for CodedNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.messages == other.messages && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for CodedNetwork {}

impl fmt::Debug for CodedNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodedNetwork")
            .field("name", &self.name)
            .field("messages", &self.messages.len())
            .field("nodes", &self.nodes.len())
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl CodedNetwork {
    pub fn new(name: impl Into<String>, mut messages: Vec<MessageId>, mut nodes: Vec<NetNode>, mut edges: Vec<NetEdge>) -> Self {
        messages.sort();
        nodes.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.kind.cmp(&b.kind)));
        edges.sort();
        let mut node_index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            node_index.entry(n.id.clone()).or_insert(i);
        }
        let mut edge_index = BTreeMap::new();
        let mut in_edges = vec![Vec::new(); nodes.len()];
        let mut out_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            edge_index.entry(e.id.clone()).or_insert(i);
            if let Some(&t) = node_index.get(&e.tail) {
                out_edges[t].push(i);
            }
            if let Some(&h) = node_index.get(&e.head) {
                in_edges[h].push(i);
            }
        }
        CodedNetwork {
            name: name.into(),
            messages,
            nodes,
            edges,
            node_index,
            edge_index,
            in_edges,
            out_edges,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        let mut n = self.clone();
        n.name = name.into();
        n
    }

    pub fn messages(&self) -> &[MessageId] {
        &self.messages
    }

    pub fn nodes(&self) -> &[NetNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&NetNode> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn edge(&self, id: &str) -> Option<&NetEdge> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn has_message(&self, m: &MessageId) -> bool {
        self.messages.binary_search(m).is_ok()
    }

    pub fn message_index(&self, m: &MessageId) -> Option<usize> {
        self.messages.binary_search(m).ok()
    }

    /// `In(v)`, sorted by edge id.
    pub fn in_edges(&self, node: &str) -> impl Iterator<Item = &NetEdge> + '_ {
        let idx = self.node_index.get(node).copied();
        idx.into_iter().flat_map(move |i| self.in_edges[i].iter().map(move |&e| &self.edges[e]))
    }

    pub fn out_edges(&self, node: &str) -> impl Iterator<Item = &NetEdge> + '_ {
        let idx = self.node_index.get(node).copied();
        idx.into_iter().flat_map(move |i| self.out_edges[i].iter().map(move |&e| &self.edges[e]))
    }

    pub fn in_degree(&self, node: &str) -> usize {
        self.in_edges(node).count()
    }

    pub fn out_degree(&self, node: &str) -> usize {
        self.out_edges(node).count()
    }

    pub fn sources(&self) -> impl Iterator<Item = &NetNode> + '_ {
        self.nodes.iter().filter(|n| n.role() == Role::Source)
    }

    pub fn terminals(&self) -> impl Iterator<Item = &NetNode> + '_ {
        self.nodes.iter().filter(|n| n.role() == Role::Terminal)
    }

    pub fn generators_of<'a>(&'a self, m: &'a MessageId) -> impl Iterator<Item = &'a NetNode> + 'a {
        self.nodes.iter().filter(move |n| n.generates() == Some(m))
    }

    pub fn demanders_of<'a>(&'a self, m: &'a MessageId) -> impl Iterator<Item = &'a NetNode> + 'a {
        self.nodes.iter().filter(move |n| n.demands() == Some(m))
    }

    /// Checks every structural assumption; an empty report means valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = BTreeSet::new();
        for m in &self.messages {
            if m.as_str().is_empty() {
                violations.push(Violation::EmptyMessageName);
            }
            if !seen.insert(m) {
                violations.push(Violation::DuplicateMessage(m.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(&n.id) {
                violations.push(Violation::DuplicateNodeId(n.id.clone()));
            }
            if let Some(m) = n.generates().or(n.demands()) {
                if !self.has_message(m) {
                    violations.push(Violation::UndeclaredMessage {
                        node: n.id.clone(),
                        message: m.clone(),
                    });
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if !seen.insert(&e.id) {
                violations.push(Violation::DuplicateEdgeId(e.id.clone()));
            }
            if !pairs.insert((&e.tail, &e.head)) {
                violations.push(Violation::ParallelEdge {
                    tail: e.tail.clone(),
                    head: e.head.clone(),
                });
            }
            for end in [&e.tail, &e.head] {
                if self.node(end).is_none() {
                    violations.push(Violation::DanglingEndpoint {
                        edge: e.id.clone(),
                        node: end.clone(),
                    });
                }
            }
            if let Some(h) = self.node(&e.head) {
                if h.role() == Role::Source {
                    violations.push(Violation::SourceHasInEdge {
                        node: h.id.clone(),
                        edge: e.id.clone(),
                    });
                }
            }
            if let Some(t) = self.node(&e.tail) {
                if t.role() == Role::Terminal {
                    violations.push(Violation::TerminalHasOutEdge {
                        node: t.id.clone(),
                        edge: e.id.clone(),
                    });
                }
            }
        }
        if let Err(NetworkError::Cycle(nodes)) = self.topological_order() {
            violations.push(Violation::Cycle(nodes));
        }
        ValidationReport { violations }
    }

    /// Kahn's algorithm with lexicographic tie-break among ready nodes.
    pub fn topological_order(&self) -> Result<Vec<String>, NetworkError> {
        self.topological_order_with(TieBreak::Lexicographic)
    }

    pub fn topological_order_with(&self, tie: TieBreak) -> Result<Vec<String>, NetworkError> {
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        // Edges with dangling endpoints are ignored here; validate reports them.
        let mut ready_fwd: BTreeSet<usize> = BTreeSet::new();
        let mut ready_rev: BinaryHeap<usize> = BinaryHeap::new();
        let push = |i: usize, f: &mut BTreeSet<usize>, r: &mut BinaryHeap<usize>| match tie {
            TieBreak::Lexicographic => {
                f.insert(i);
            }
            TieBreak::ReverseLexicographic => r.push(i),
        };
        for (i, &d) in indeg.iter().enumerate() {
            if d == 0 {
                push(i, &mut ready_fwd, &mut ready_rev);
            }
        }
        let mut order = Vec::with_capacity(self.nodes.len());
        loop {
            let next = match tie {
                TieBreak::Lexicographic => ready_fwd.pop_first(),
                TieBreak::ReverseLexicographic => ready_rev.pop(),
            };
            let Some(v) = next else { break };
            order.push(self.nodes[v].id.clone());
            for &e in &self.out_edges[v] {
                let Some(&h) = self.node_index.get(&self.edges[e].head) else { continue };
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    push(h, &mut ready_fwd, &mut ready_rev);
                }
            }
        }
        if order.len() < self.nodes.len() {
            let placed: BTreeSet<&String> = order.iter().collect();
            let stuck = self.nodes.iter().map(|n| n.id.clone()).filter(|id| !placed.contains(id)).collect();
            return Err(NetworkError::Cycle(stuck));
        }
        Ok(order)
    }

    /// Edges sorted so that every edge follows all in-edges of its tail.
    /// In-edges of each node are grouped consecutively, nodes visited in
    /// topological order.
    pub fn edge_order_with(&self, tie: TieBreak) -> Result<Vec<&NetEdge>, NetworkError> {
        let order = self.topological_order_with(tie)?;
        let pos: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut out = Vec::with_capacity(self.edges.len());
        for v in &order {
            let mut ins: Vec<&NetEdge> = self.in_edges(v).collect();
            ins.sort_by_key(|e| (pos[e.tail.as_str()], e.id.as_str()));
            if tie == TieBreak::ReverseLexicographic {
                ins.reverse();
            }
            out.extend(ins);
        }
        Ok(out)
    }

    pub fn edge_order(&self) -> Result<Vec<&NetEdge>, NetworkError> {
        self.edge_order_with(TieBreak::Lexicographic)
    }

    /// Checks the multiple-unicast property: one generator and one demander
    /// per message. The witness lists the offending messages.
    pub fn multiple_unicast_check(&self) -> UnicastCheck {
        let mut gen: BTreeMap<&MessageId, usize> = self.messages.iter().map(|m| (m, 0)).collect();
        let mut dem = gen.clone();
        for n in &self.nodes {
            if let Some(m) = n.generates() {
                *gen.entry(m).or_default() += 1;
            }
            if let Some(m) = n.demands() {
                *dem.entry(m).or_default() += 1;
            }
        }
        let violations: Vec<UnicastViolation> = gen
            .iter()
            .filter_map(|(m, &g)| {
                let d = dem.get(m).copied().unwrap_or(0);
                (g != 1 || d != 1).then(|| UnicastViolation {
                    message: (*m).clone(),
                    generators: g,
                    demanders: d,
                })
            })
            .collect();
        UnicastCheck {
            is_multiple_unicast: violations.is_empty(),
            violations,
        }
    }

    pub fn is_multiple_unicast(&self) -> bool {
        self.multiple_unicast_check().is_multiple_unicast
    }

    /// Canonical JSON document.
    pub fn save(&self) -> String {
        let doc = NetworkDoc {
            name: self.name.clone(),
            messages: self.messages.iter().map(|m| m.as_str().to_string()).collect(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.clone(),
                    role: n.role(),
                    generates: n.generates().map(|m| m.as_str().to_string()),
                    demands: n.demands().map(|m| m.as_str().to_string()),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    from: e.tail.clone(),
                    to: e.head.clone(),
                })
                .collect(),
        };
        crate::canonical_json(&doc)
    }

    pub fn load(text: &str) -> Result<Self, NetworkError> {
        let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, n) in doc.nodes.into_iter().enumerate() {
            let kind = match (n.role, n.generates, n.demands) {
                (Role::Source, Some(m), None) => NodeKind::Source(MessageId(m)),
                (Role::Intermediate, None, None) => NodeKind::Intermediate,
                (Role::Terminal, None, Some(m)) => NodeKind::Terminal(MessageId(m)),
                (role, ..) => {
                    return Err(NetworkError::Parse(format!(
                        "nodes[{i}] ({}): role {role} requires {}",
                        n.id,
                        match role {
                            Role::Source => "\"generates\" and no \"demands\"",
                            Role::Intermediate => "neither \"generates\" nor \"demands\"",
                            Role::Terminal => "\"demands\" and no \"generates\"",
                        }
                    )))
                }
            };
            nodes.push(NetNode { id: n.id, kind });
        }
        let edges = doc.edges.into_iter().map(|e| NetEdge::named(e.id, e.from, e.to)).collect();
        let messages = doc.messages.into_iter().map(MessageId).collect();
        Ok(CodedNetwork::new(doc.name, messages, nodes, edges))
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph \"{}\" {{\n", self.name.replace('"', "'"));
        for n in &self.nodes {
            let (shape, label) = match &n.kind {
                NodeKind::Source(m) => ("box", format!("{}\\n+{}", n.id, m)),
                NodeKind::Intermediate => ("ellipse", n.id.clone()),
                NodeKind::Terminal(m) => ("doubleoctagon", format!("{}\\n?{}", n.id, m)),
            };
            s.push_str(&format!("  \"{}\" [shape={shape}, label=\"{label}\"];\n", n.id));
        }
        for e in &self.edges {
            s.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", e.tail, e.head, e.id));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cycle(Vec<String>),
    SourceHasInEdge { node: String, edge: String },
    TerminalHasOutEdge { node: String, edge: String },
    DanglingEndpoint { edge: String, node: String },
    UndeclaredMessage { node: String, message: MessageId },
    DuplicateNodeId(String),
    DuplicateEdgeId(String),
    DuplicateMessage(MessageId),
    EmptyMessageName,
    ParallelEdge { tail: String, head: String },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Cycle(_) => "cycle",
            Violation::SourceHasInEdge { .. } => "source-has-in-edge",
            Violation::TerminalHasOutEdge { .. } => "terminal-has-out-edge",
            Violation::DanglingEndpoint { .. } => "dangling-endpoint",
            Violation::UndeclaredMessage { .. } => "undeclared-message",
            Violation::DuplicateNodeId(_) => "duplicate-node-id",
            Violation::DuplicateEdgeId(_) => "duplicate-edge-id",
            Violation::DuplicateMessage(_) => "duplicate-message",
            Violation::EmptyMessageName => "empty-message-name",
            Violation::ParallelEdge { .. } => "parallel-edge",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        match self {
            Violation::Cycle(nodes) => write!(f, " among {}", nodes.join(", ")),
            Violation::SourceHasInEdge { node, edge } | Violation::TerminalHasOutEdge { node, edge } => {
                write!(f, " ({node} via {edge})")
            }
            Violation::DanglingEndpoint { edge, node } => write!(f, " ({edge} -> missing {node})"),
            Violation::UndeclaredMessage { node, message } => write!(f, " ({node}: {message})"),
            Violation::DuplicateNodeId(id) | Violation::DuplicateEdgeId(id) => write!(f, " ({id})"),
            Violation::DuplicateMessage(m) => write!(f, " ({m})"),
            Violation::EmptyMessageName => Ok(()),
            Violation::ParallelEdge { tail, head } => write!(f, " ({tail} -> {head})"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), NetworkError> {
        if self.is_valid() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(NetworkError::Invalid(msgs.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnicastViolation {
    pub message: MessageId,
    pub generators: usize,
    pub demanders: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnicastCheck {
    pub is_multiple_unicast: bool,
    pub violations: Vec<UnicastViolation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    name: String,
    messages: Vec<String>,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
    role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generates: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demands: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    from: String,
    to: String,
}
