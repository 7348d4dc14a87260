//! Generators for the networks N1(q, n) and N2(q, n), k-copy unions, and
//! the gadget that turns a network into a multiple-unicast one.
//!
//! Naming follows the figures: sources are named by their message
//! (`a1`, `b2_1`, `c3`), intermediates `u1..u14`, `v1`, `v1p`, `w1`, `w1p`,
//! and each named edge `e_i` becomes two nodes `e{i}t -> e{i}h` joined by
//! edge `e{i}`. Terminals are `<set>:<message>`, e.g. `Tc:c1`, `Tb2:b2_1`.
//! Other edges are named `<tail>-><head>`.
//!
//! The network name records how it was built (see [`Recipe`]) so a code can
//! be reconstructed for it later.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::network::{CodedNetwork, MessageId, NetEdge, NetNode, NodeKind, Role};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("parameter {name}={value} out of range (must be >= {min})")]
    OutOfRange { name: &'static str, value: usize, min: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a recognized construction name: {0}")]
    UnknownRecipe(String),
}

fn check_param(name: &'static str, value: usize, min: usize) -> Result<(), ConstructionError> {
    if value < min {
        return Err(ConstructionError::OutOfRange { name, value, min });
    }
    Ok(())
}

pub fn msg_a(j: usize) -> String {
    format!("a{j}")
}

pub fn msg_b(i: usize, j: usize) -> String {
    format!("b{i}_{j}")
}

pub fn msg_c(j: usize) -> String {
    format!("c{j}")
}

/// N1(q, n): rate-1/n solvable iff the characteristic divides `q`.
pub fn gen_n1(q: usize, n: usize) -> Result<CodedNetwork, ConstructionError> {
    check_param("q", q, 2)?;
    check_param("n", n, 1)?;
    let bs = 1..q; // b-sets 1..=q-1
    let js = 1..=n;

    let mut messages = Vec::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    for j in js.clone() {
        messages.push(MessageId::new(msg_a(j)));
        messages.push(MessageId::new(msg_c(j)));
        nodes.push(NetNode::source(msg_a(j), msg_a(j)));
        nodes.push(NetNode::source(msg_c(j), msg_c(j)));
        for i in bs.clone() {
            messages.push(MessageId::new(msg_b(i, j)));
            nodes.push(NetNode::source(msg_b(i, j), msg_b(i, j)));
        }
    }
    for u in 1..=14 {
        nodes.push(NetNode::intermediate(format!("u{u}")));
    }
    for i in bs.clone() {
        for id in [format!("e{i}t"), format!("e{i}h"), format!("v{i}"), format!("v{i}p"), format!("w{i}"), format!("w{i}p")] {
            nodes.push(NetNode::intermediate(id));
        }
    }

    // Source edges.
    for j in js.clone() {
        edges.push(NetEdge::new(msg_a(j), "u1"));
        edges.push(NetEdge::new(msg_c(j), "u2"));
        edges.push(NetEdge::new(msg_a(j), "u11"));
        edges.push(NetEdge::new(msg_c(j), "u6"));
        for i in bs.clone() {
            let b = msg_b(i, j);
            edges.push(NetEdge::new(&b, "u1"));
            edges.push(NetEdge::new(&b, "u2"));
            for k in bs.clone().filter(|&k| k != i) {
                edges.push(NetEdge::new(&b, format!("e{k}t")));
                edges.push(NetEdge::new(&b, format!("v{k}")));
            }
            edges.push(NetEdge::new(&b, format!("w{i}")));
        }
    }
    // Intermediate edges.
    for (t, h) in [
        (1, 3),
        (2, 4),
        (3, 5),
        (5, 7),
        (6, 8),
        (7, 9),
        (4, 5),
        (8, 9),
        (9, 10),
        (11, 12),
        (13, 14),
        (3, 6),
        (7, 11),
        (8, 13),
    ] {
        edges.push(NetEdge::new(format!("u{t}"), format!("u{h}")));
    }
    for i in bs.clone() {
        edges.push(NetEdge::named(format!("e{i}"), format!("e{i}t"), format!("e{i}h")));
        edges.push(NetEdge::new("u4", format!("e{i}t")));
        edges.push(NetEdge::new(format!("e{i}h"), "u13"));
        edges.push(NetEdge::new(format!("e{i}h"), format!("w{i}")));
        edges.push(NetEdge::new("u10", format!("v{i}")));
        edges.push(NetEdge::new(format!("v{i}"), format!("v{i}p")));
        edges.push(NetEdge::new(format!("w{i}"), format!("w{i}p")));
    }
    // Terminals.
    let mut add_terminal = |set: String, from: String, demand: String| {
        let id = format!("{set}:{demand}");
        edges.push(NetEdge::new(from, &id));
        nodes.push(NetNode::terminal(id, demand));
    };
    for j in js.clone() {
        add_terminal("Tc".into(), "u12".into(), msg_c(j));
        add_terminal("Ta".into(), "u14".into(), msg_a(j));
        for i in bs.clone() {
            add_terminal(format!("Tb{i}"), format!("v{i}p"), msg_b(i, j));
            add_terminal(format!("Tc{i}"), format!("w{i}p"), msg_c(j));
        }
    }

    let name = Recipe::base(Family::N1, q, n).to_string();
    Ok(CodedNetwork::new(name, messages, nodes, edges))
}

/// N2(q, n): rate-1/n solvable iff the characteristic does not divide `q`.
pub fn gen_n2(q: usize, n: usize) -> Result<CodedNetwork, ConstructionError> {
    check_param("q", q, 2)?;
    check_param("n", n, 1)?;
    let bs = 1..=q;
    let js = 1..=n;

    let mut messages = Vec::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    let named = ["ea", "eb", "eap", "ebp"].into_iter().map(String::from).chain(bs.clone().flat_map(|i| [format!("e{i}"), format!("e{i}p")]));
    for e in named {
        nodes.push(NetNode::intermediate(format!("{e}t")));
        nodes.push(NetNode::intermediate(format!("{e}h")));
        edges.push(NetEdge::named(&e, format!("{e}t"), format!("{e}h")));
    }

    for j in js.clone() {
        let a = msg_a(j);
        messages.push(MessageId::new(&a));
        nodes.push(NetNode::source(&a, &a));
        edges.push(NetEdge::new(&a, "eat"));
        for i in bs.clone() {
            edges.push(NetEdge::new(&a, format!("e{i}t")));
        }
        for i in bs.clone() {
            let b = msg_b(i, j);
            messages.push(MessageId::new(&b));
            nodes.push(NetNode::source(&b, &b));
            edges.push(NetEdge::new(&b, "eat"));
            edges.push(NetEdge::new(&b, "ebt"));
            for k in bs.clone().filter(|&k| k != i) {
                edges.push(NetEdge::new(&b, format!("e{k}t")));
            }
        }
    }
    edges.push(NetEdge::new("eah", "eapt"));
    edges.push(NetEdge::new("ebh", "eapt"));
    edges.push(NetEdge::new("ebh", "ebpt"));
    for i in bs.clone() {
        edges.push(NetEdge::new(format!("e{i}h"), format!("e{i}pt")));
        edges.push(NetEdge::new("eah", format!("e{i}pt")));
        edges.push(NetEdge::new(format!("e{i}h"), "ebpt"));
    }

    let mut add_terminal = |set: String, from: String, demand: String| {
        let id = format!("{set}:{demand}");
        edges.push(NetEdge::new(from, &id));
        nodes.push(NetNode::terminal(id, demand));
    };
    for j in js {
        add_terminal("Ta1".into(), "eaph".into(), msg_a(j));
        add_terminal("Ta2".into(), "ebph".into(), msg_a(j));
        for i in bs.clone() {
            add_terminal(format!("Tb{i}"), format!("e{i}ph"), msg_b(i, j));
        }
    }

    let name = Recipe::base(Family::N2, q, n).to_string();
    Ok(CodedNetwork::new(name, messages, nodes, edges))
}

/// The Fano network as the smallest N1.
pub fn gen_fano() -> CodedNetwork {
    gen_n1(2, 1).expect("fixed parameters")
}

/// The non-Fano network as the smallest N2.
pub fn gen_nonfano() -> CodedNetwork {
    gen_n2(2, 1).expect("fixed parameters")
}

/// Node id of a replicated intermediate node in copy `copy` (1-based).
pub fn copy_node_id(id: &str, copy: usize) -> String {
    format!("{id}@{copy}")
}

/// Edge id of edge `id` in copy `copy` (1-based).
pub fn copy_edge_id(id: &str, copy: usize) -> String {
    format!("{id}@{copy}")
}

/// `k` disjoint copies of `net` with the copies of every source merged into
/// one source and the copies of every terminal merged into one terminal.
pub fn union_copies(net: &CodedNetwork, k: usize) -> Result<CodedNetwork, ConstructionError> {
    check_param("copies", k, 1)?;
    require_valid(net)?;
    if k > 1 {
        let merged = |id: &str| net.node(id).is_some_and(|n| n.role() != Role::Intermediate);
        if let Some(e) = net.edges().iter().find(|e| merged(&e.tail) && merged(&e.head)) {
            return Err(ConstructionError::Precondition(format!(
                "edge {} joins a source to a terminal; its copies would be parallel edges",
                e.id
            )));
        }
    }
    let mut nodes = Vec::new();
    for node in net.nodes() {
        match node.role() {
            Role::Intermediate => {
                for c in 1..=k {
                    nodes.push(NetNode::intermediate(copy_node_id(&node.id, c)));
                }
            }
            _ => nodes.push(node.clone()),
        }
    }
    let map_node = |id: &str, c: usize| -> String {
        match net.node(id).map(NetNode::role) {
            Some(Role::Intermediate) => copy_node_id(id, c),
            _ => id.to_string(),
        }
    };
    let mut edges = Vec::new();
    for e in net.edges() {
        for c in 1..=k {
            edges.push(NetEdge::named(copy_edge_id(&e.id, c), map_node(&e.tail, c), map_node(&e.head, c)));
        }
    }
    let name = format!("{}{}", net.name(), Transform::Union(k));
    Ok(CodedNetwork::new(name, net.messages().to_vec(), nodes, edges))
}

fn require_valid(net: &CodedNetwork) -> Result<(), ConstructionError> {
    net.validate()
        .into_result()
        .map_err(|e| ConstructionError::Precondition(e.to_string()))
}

/// One attachment of the gadget to a pair of terminals demanding the same
/// message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetApplication {
    /// 1-based application counter.
    pub index: usize,
    /// The shared demand `b`.
    pub message: MessageId,
    /// The two demoted terminals.
    pub n1: String,
    pub n2: String,
    /// New source generating `z`.
    pub x1: String,
    pub z: MessageId,
    /// New sources `s_i` generating `y_i`, `i = 1..n-1`.
    pub side_sources: Vec<(String, MessageId)>,
    pub x2: String,
    pub x3: String,
    /// New terminal demanding `b`.
    pub x4: String,
    /// New terminal demanding `z`.
    pub x5: String,
    /// New terminals `t_i` demanding `y_i`.
    pub side_terminals: Vec<String>,
}

impl GadgetApplication {
    fn new(index: usize, message: MessageId, n1: String, n2: String, n: usize) -> Self {
        let id = |s: &str| format!("g{index}:{s}");
        GadgetApplication {
            index,
            message,
            n1,
            n2,
            x1: id("x1"),
            z: MessageId::new(format!("z#{index}")),
            side_sources: (1..n).map(|i| (id(&format!("s{i}")), MessageId::new(format!("y#{index}_{i}")))).collect(),
            x2: id("x2"),
            x3: id("x3"),
            x4: id("x4"),
            x5: id("x5"),
            side_terminals: (1..n).map(|i| id(&format!("t{i}"))).collect(),
        }
    }

    pub fn bottleneck_edge(&self) -> String {
        format!("{}->{}", self.x2, self.x3)
    }
}

/// Repeatedly attaches the gadget to the two lexicographically smallest
/// terminals that share a demand until every message has one demander.
pub fn gadget_transform(net: &CodedNetwork, n: usize) -> Result<CodedNetwork, ConstructionError> {
    gadget_transform_logged(net, n).map(|(net, _)| net)
}

/// As [`gadget_transform`], also returning the applications in order.
pub fn gadget_transform_logged(net: &CodedNetwork, n: usize) -> Result<(CodedNetwork, Vec<GadgetApplication>), ConstructionError> {
    check_param("n", n, 1)?;
    require_valid(net)?;
    for m in net.messages() {
        let g = net.generators_of(m).count();
        let d = net.demanders_of(m).count();
        if g != 1 || d == 0 {
            return Err(ConstructionError::Precondition(format!(
                "message {m} has {g} generators and {d} demanders"
            )));
        }
    }

    let mut messages = net.messages().to_vec();
    let mut nodes: BTreeMap<String, NetNode> = net.nodes().iter().map(|n| (n.id.clone(), n.clone())).collect();
    let mut edges = net.edges().to_vec();
    let mut log = Vec::new();

    loop {
        let mut demanders: BTreeMap<&MessageId, Vec<&str>> = BTreeMap::new();
        for node in nodes.values() {
            if let NodeKind::Terminal(m) = &node.kind {
                demanders.entry(m).or_default().push(&node.id);
            }
        }
        // Smallest terminal id with a shared demand, paired with the next
        // smallest terminal demanding the same message.
        let pick = demanders
            .iter()
            .filter(|(_, ts)| ts.len() >= 2)
            .map(|(m, ts)| (ts[0], ts[1], (*m).clone()))
            .min();
        let Some((n1, n2, b)) = pick else { break };
        let app = GadgetApplication::new(log.len() + 1, b.clone(), n1.to_string(), n2.to_string(), n);

        nodes.insert(app.n1.clone(), NetNode::intermediate(&app.n1));
        nodes.insert(app.n2.clone(), NetNode::intermediate(&app.n2));
        messages.push(app.z.clone());
        nodes.insert(app.x1.clone(), NetNode::source(&app.x1, &app.z));
        for (s, y) in &app.side_sources {
            messages.push(y.clone());
            nodes.insert(s.clone(), NetNode::source(s, y));
        }
        for id in [&app.x2, &app.x3] {
            nodes.insert(id.clone(), NetNode::intermediate(id));
        }
        nodes.insert(app.x4.clone(), NetNode::terminal(&app.x4, &b));
        nodes.insert(app.x5.clone(), NetNode::terminal(&app.x5, &app.z));
        for (t, (_, y)) in app.side_terminals.iter().zip(&app.side_sources) {
            nodes.insert(t.clone(), NetNode::terminal(t, y));
        }

        edges.push(NetEdge::new(&app.n1, &app.x2));
        edges.push(NetEdge::new(&app.x1, &app.x2));
        for (s, _) in &app.side_sources {
            edges.push(NetEdge::new(s, &app.x2));
        }
        edges.push(NetEdge::new(&app.x2, &app.x3));
        edges.push(NetEdge::new(&app.x3, &app.x4));
        edges.push(NetEdge::new(&app.x3, &app.x5));
        for t in &app.side_terminals {
            edges.push(NetEdge::new(&app.x3, t));
        }
        edges.push(NetEdge::new(&app.x1, &app.x4));
        edges.push(NetEdge::new(&app.n2, &app.x5));
        log.push(app);
    }

    let name = if log.is_empty() {
        net.name().to_string()
    } else {
        format!("{}{}", net.name(), Transform::Gadget(n))
    };
    let out = CodedNetwork::new(name, messages, nodes.into_values().collect(), edges);
    Ok((out, log))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    N1,
    N2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::N1 => "n1",
            Family::N2 => "n2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Union(usize),
    Gadget(usize),
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Union(k) => write!(f, "+union(k={k})"),
            Transform::Gadget(n) => write!(f, "+gadget(n={n})"),
        }
    }
}

/// Construction metadata stored in a generated network's name, e.g.
/// `n1(q=2,n=2)+gadget(n=2)+union(k=3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub family: Family,
    pub q: usize,
    pub n: usize,
    pub transforms: Vec<Transform>,
}

impl Recipe {
    pub fn base(family: Family, q: usize, n: usize) -> Self {
        Recipe {
            family,
            q,
            n,
            transforms: Vec::new(),
        }
    }

    /// Regenerates the network the recipe describes.
    pub fn build(&self) -> Result<CodedNetwork, ConstructionError> {
        let mut net = match self.family {
            Family::N1 => gen_n1(self.q, self.n)?,
            Family::N2 => gen_n2(self.q, self.n)?,
        };
        for t in &self.transforms {
            net = match *t {
                Transform::Union(k) => union_copies(&net, k)?,
                Transform::Gadget(n) => gadget_transform(&net, n)?,
            };
        }
        Ok(net)
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(q={},n={})", self.family, self.q, self.n)?;
        for t in &self.transforms {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn parse_call<'a>(s: &'a str, name: &str) -> Option<BTreeMap<&'a str, usize>> {
    let args = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    let mut out = BTreeMap::new();
    for kv in args.split(',') {
        let (k, v) = kv.split_once('=')?;
        if out.insert(k.trim(), v.trim().parse().ok()?).is_some() {
            return None;
        }
    }
    Some(out)
}

impl FromStr for Recipe {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstructionError::UnknownRecipe(s.to_string());
        let mut parts = s.split('+');
        let head = parts.next().ok_or_else(bad)?;
        let (family, args) = [("n1", Family::N1), ("n2", Family::N2)]
            .into_iter()
            .find_map(|(tag, fam)| parse_call(head, tag).map(|a| (fam, a)))
            .ok_or_else(bad)?;
        if args.len() != 2 {
            return Err(bad());
        }
        let (q, n) = (*args.get("q").ok_or_else(bad)?, *args.get("n").ok_or_else(bad)?);
        let mut transforms = Vec::new();
        for part in parts {
            let t = if let Some(a) = parse_call(part, "union") {
                Transform::Union(*a.get("k").filter(|_| a.len() == 1).ok_or_else(bad)?)
            } else if let Some(a) = parse_call(part, "gadget") {
                Transform::Gadget(*a.get("n").filter(|_| a.len() == 1).ok_or_else(bad)?)
            } else {
                return Err(bad());
            };
            transforms.push(t);
        }
        Ok(Recipe {
            family,
            q,
            n,
            transforms,
        })
    }
}
