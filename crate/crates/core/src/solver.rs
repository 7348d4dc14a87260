//! Exhaustive search for `(k, n)` linear solutions over GF(p).
//!
//! The search assigns each edge, in [`CodedNetwork::edge_order`], the row
//! space of its global transfer matrix: a subspace of `F_p^{mk}` (`m`
//! messages) inside the span of what its tail receives. Only subspaces of
//! the largest feasible dimension `min(n, dim span)` are tried; any smaller
//! choice is contained in one of them and downstream coefficients can
//! ignore the extra content, so nothing is lost.
//!
//! A prefix is cut as soon as some terminal cannot possibly receive its
//! demand: for unassigned edges the bound is the span of everything that
//! could reach them.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{debug, info};
use serde_json::json;
use thiserror::Error;

use crate::code::{verify, CodeError, FractionalCode, InputRef};
use crate::field::PrimeModulus;
use crate::matrix::FieldMatrix;
use crate::network::{CodedNetwork, NodeKind};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of edge assignments tried before giving up.
    pub node_budget: u64,
    /// Allows `(k, n) != (1, 1)` in [`search_fractional`].
    pub enable_fractional: bool,
    pub k: usize,
    pub n: usize,
    pub worker_count: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: DEFAULT_BUDGET,
            enable_fractional: false,
            k: 1,
            n: 1,
            worker_count: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Solvable { code: FractionalCode, states_explored: u64 },
    ExhaustedUnsolvable { states_explored: u64 },
    Inconclusive { states_explored: u64 },
}

impl SearchOutcome {
    pub fn states_explored(&self) -> u64 {
        match self {
            SearchOutcome::Solvable { states_explored, .. }
            | SearchOutcome::ExhaustedUnsolvable { states_explored }
            | SearchOutcome::Inconclusive { states_explored } => *states_explored,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Solvable { .. } => "solvable",
            SearchOutcome::ExhaustedUnsolvable { .. } => "unsolvable",
            SearchOutcome::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_solvable(&self) -> bool {
        matches!(self, SearchOutcome::Solvable { .. })
    }

    pub fn code(&self) -> Option<&FractionalCode> {
        match self {
            SearchOutcome::Solvable { code, .. } => Some(code),
            _ => None,
        }
    }

    /// `{"outcome": ..., "states": ..., "code"?: <code document>}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "outcome": self.label(), "states": self.states_explored() });
        if let Some(code) = self.code() {
            let doc: serde_json::Value = serde_json::from_str(&code.save()).expect("code documents are valid JSON");
            v["code"] = doc;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("network is not valid: {0}")]
    InvalidNetwork(String),
    #[error("fractional search (k={k}, n={n}) is disabled in the configuration")]
    FractionalDisabled { k: usize, n: usize },
    #[error("block sizes must be positive (k={k}, n={n})")]
    BadDimensions { k: usize, n: usize },
    #[error("witness failed verification: {0}")]
    WitnessRejected(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Scalar `(1, 1)` search.
pub fn search_scalar(net: &CodedNetwork, p: PrimeModulus, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    run(net, 1, 1, p, cfg)
}

/// `(k, n)` search; needs `enable_fractional` unless `k = n = 1`.
pub fn search_fractional(net: &CodedNetwork, k: usize, n: usize, p: PrimeModulus, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    if k == 0 || n == 0 {
        return Err(SearchError::BadDimensions { k, n });
    }
    if (k, n) != (1, 1) && !cfg.enable_fractional {
        return Err(SearchError::FractionalDisabled { k, n });
    }
    run(net, k, n, p, cfg)
}

/// Whether unit vector `demand` lies in the span of `vectors`.
pub fn decodable(vectors: &[Vec<u64>], demand: usize, p: PrimeModulus) -> bool {
    let mut span = Span::default();
    for v in vectors {
        span.insert(v.clone(), p);
    }
    let mut unit = vec![0; vectors.first().map_or(demand + 1, Vec::len)];
    if demand >= unit.len() {
        return false;
    }
    unit[demand] = 1;
    span.contains(unit, p)
}

/// A subspace kept as echelon rows with distinct pivots (leading entry 1),
/// sorted by pivot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Span {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Span {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u64], p: PrimeModulus) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                for (x, &r) in v.iter_mut().zip(row).skip(c) {
                    *x = p.sub(*x, p.mul(f, r));
                }
            }
        }
    }

    /// Adds `v` to the span; false if it was already inside.
    fn insert(&mut self, mut v: Vec<u64>, p: PrimeModulus) -> bool {
        self.reduce(&mut v, p);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = p.inv(v[c]).expect("nonzero");
        for x in v.iter_mut().skip(c) {
            *x = p.mul(*x, inv);
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, v);
        true
    }

    fn join(&mut self, other: &Span, p: PrimeModulus) {
        for r in &other.rows {
            self.insert(r.clone(), p);
        }
    }

    fn contains(&self, mut v: Vec<u64>, p: PrimeModulus) -> bool {
        self.reduce(&mut v, p);
        v.iter().all(|&x| x == 0)
    }

    /// Every subspace of dimension `r` of this span, each given by a basis.
    fn subspaces(&self, r: usize, p: PrimeModulus) -> Vec<Span> {
        let d = self.dim();
        let mut out = Vec::new();
        let mut pivots = Vec::with_capacity(r);
        choose_pivots(d, r, 0, &mut pivots, &mut |piv: &[usize]| {
            // Free coefficient slots: row i, columns after its pivot that
            // are not pivots themselves.
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|i| ((piv[i] + 1)..d).filter(move |c| !piv.contains(c)).map(move |c| (i, c)))
                .collect();
            let mut coeff = vec![0u64; free.len()];
            loop {
                let mut s = Span::default();
                for (i, &pc) in piv.iter().enumerate() {
                    let mut v = self.rows[pc].clone();
                    for (slot, &(row, col)) in free.iter().enumerate() {
                        if row == i && coeff[slot] != 0 {
                            for (x, &b) in v.iter_mut().zip(&self.rows[col]) {
                                *x = p.add(*x, p.mul(coeff[slot], b));
                            }
                        }
                    }
                    s.insert(v, p);
                }
                out.push(s);
                // Odometer over p^free.
                let mut i = 0;
                loop {
                    if i == coeff.len() {
                        return;
                    }
                    coeff[i] += 1;
                    if coeff[i] < p.get() {
                        break;
                    }
                    coeff[i] = 0;
                    i += 1;
                }
            }
        });
        out
    }
}

fn choose_pivots(d: usize, r: usize, from: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if acc.len() == r {
        f(acc);
        return;
    }
    for c in from..d {
        if d - c < r - acc.len() {
            break;
        }
        acc.push(c);
        choose_pivots(d, r, c + 1, acc, f);
        acc.pop();
    }
}

enum Input {
    Source(usize),
    Parents(Vec<usize>),
}

struct Terminal {
    parents: Vec<usize>,
    demand: usize,
}

struct Plan<'a> {
    net: &'a CodedNetwork,
    p: PrimeModulus,
    k: usize,
    n: usize,
    edge_ids: Vec<String>,
    inputs: Vec<Input>,
    terminals: Vec<Terminal>,
    /// Span of the `k` unit rows of each message.
    message_spans: Vec<Span>,
}

struct Shared {
    budget: u64,
    states: AtomicU64,
    stop: AtomicBool,
    over_budget: AtomicBool,
    witness: Mutex<Option<Vec<Span>>>,
}

enum Flow {
    Found,
    Exhausted,
    Stopped,
}

impl<'a> Plan<'a> {
    fn new(net: &'a CodedNetwork, k: usize, n: usize, p: PrimeModulus) -> Result<Self, SearchError> {
        net.validate()
            .into_result()
            .map_err(|e| SearchError::InvalidNetwork(e.to_string()))?;
        let order = net.edge_order().map_err(|e| SearchError::InvalidNetwork(e.to_string()))?;
        let pos: std::collections::BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let m = net.messages().len();
        let dim = m * k;
        let msg_index = |id| net.message_index(id).expect("validated message");
        let inputs = order
            .iter()
            .map(|e| match &net.node(&e.tail).expect("validated endpoint").kind {
                NodeKind::Source(msg) => Input::Source(msg_index(msg)),
                _ => Input::Parents(net.in_edges(&e.tail).map(|pe| pos[pe.id.as_str()]).collect()),
            })
            .collect();
        let terminals = net
            .terminals()
            .map(|t| Terminal {
                parents: net.in_edges(&t.id).map(|pe| pos[pe.id.as_str()]).collect(),
                demand: msg_index(t.demands().expect("terminal")),
            })
            .collect();
        let message_spans = (0..m)
            .map(|j| {
                let mut s = Span::default();
                for i in 0..k {
                    let mut v = vec![0; dim];
                    v[j * k + i] = 1;
                    s.insert(v, p);
                }
                s
            })
            .collect();
        Ok(Plan {
            net,
            p,
            k,
            n,
            edge_ids: order.iter().map(|e| e.id.clone()).collect(),
            inputs,
            terminals,
            message_spans,
        })
    }

    fn candidates(&self, assigned: &[Span]) -> Vec<Span> {
        let pos = assigned.len();
        let span = match &self.inputs[pos] {
            Input::Source(j) => self.message_spans[*j].clone(),
            Input::Parents(ps) => {
                let mut s = Span::default();
                for &q in ps {
                    s.join(&assigned[q], self.p);
                }
                s
            }
        };
        let r = self.n.min(span.dim());
        if r == span.dim() {
            return vec![span];
        }
        span.subspaces(r, self.p)
    }

    /// False if some terminal provably cannot decode under any completion
    /// of `assigned`.
    fn feasible(&self, assigned: &[Span]) -> bool {
        let done = assigned.len();
        let mut bound: Vec<Span> = Vec::with_capacity(self.edge_ids.len() - done);
        for pos in done..self.edge_ids.len() {
            let s = match &self.inputs[pos] {
                Input::Source(j) => self.message_spans[*j].clone(),
                Input::Parents(ps) => {
                    let mut s = Span::default();
                    for &q in ps {
                        let src = if q < done { &assigned[q] } else { &bound[q - done] };
                        s.join(src, self.p);
                    }
                    s
                }
            };
            bound.push(s);
        }
        self.terminals.iter().all(|t| {
            let mut s = Span::default();
            for &q in &t.parents {
                s.join(if q < done { &assigned[q] } else { &bound[q - done] }, self.p);
            }
            self.message_spans[t.demand].rows.iter().all(|u| s.contains(u.clone(), self.p))
        })
    }

    fn dfs(&self, assigned: &mut Vec<Span>, shared: &Shared) -> Flow {
        if assigned.len() == self.edge_ids.len() {
            *shared.witness.lock().expect("witness lock") = Some(assigned.clone());
            shared.stop.store(true, Ordering::SeqCst);
            return Flow::Found;
        }
        for c in self.candidates(assigned) {
            match self.try_assign(assigned, c, shared) {
                Some(Flow::Exhausted) | None => {}
                Some(flow) => return flow,
            }
        }
        Flow::Exhausted
    }

    /// Counts one state and descends; `None` when the candidate was pruned.
    fn try_assign(&self, assigned: &mut Vec<Span>, c: Span, shared: &Shared) -> Option<Flow> {
        if shared.stop.load(Ordering::Relaxed) {
            return Some(Flow::Stopped);
        }
        if shared.states.fetch_add(1, Ordering::Relaxed) >= shared.budget {
            shared.over_budget.store(true, Ordering::SeqCst);
            shared.stop.store(true, Ordering::SeqCst);
            return Some(Flow::Stopped);
        }
        assigned.push(c);
        let flow = if self.feasible(assigned) {
            Some(self.dfs(assigned, shared))
        } else {
            None
        };
        assigned.pop();
        flow
    }

    fn search(&self, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
        let shared = Shared {
            budget: cfg.node_budget,
            states: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            over_budget: AtomicBool::new(false),
            witness: Mutex::new(None),
        };
        let mut prefix = Vec::new();
        let mut root: Option<Vec<Span>> = None;
        if self.feasible(&prefix) {
            // Forced assignments up to the first real branching point.
            loop {
                if prefix.len() == self.edge_ids.len() {
                    *shared.witness.lock().expect("witness lock") = Some(prefix.clone());
                    break;
                }
                let mut cands = self.candidates(&prefix);
                if cands.len() > 1 {
                    root = Some(cands);
                    break;
                }
                if shared.states.fetch_add(1, Ordering::Relaxed) >= shared.budget {
                    shared.over_budget.store(true, Ordering::SeqCst);
                    break;
                }
                prefix.push(cands.pop().expect("one candidate"));
                if !self.feasible(&prefix) {
                    break;
                }
            }
        }
        if let Some(cands) = root {
            debug!("branching at edge {} with {} choices", self.edge_ids[prefix.len()], cands.len());
            let next = AtomicUsize::new(0);
            let workers = cfg.worker_count.clamp(1, cands.len());
            let work = || {
                let mut assigned = prefix.clone();
                loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(c) = cands.get(i) else { break };
                    match self.try_assign(&mut assigned, c.clone(), &shared) {
                        Some(Flow::Found) | Some(Flow::Stopped) => break,
                        _ => {}
                    }
                }
            };
            if workers == 1 {
                work();
            } else {
                std::thread::scope(|s| {
                    for _ in 0..workers {
                        s.spawn(work);
                    }
                });
            }
        }

        let states = shared.states.load(Ordering::SeqCst).min(shared.budget);
        let witness = shared.witness.into_inner().expect("witness lock");
        let outcome = match witness {
            Some(spaces) => SearchOutcome::Solvable {
                code: self.reconstruct(&spaces)?,
                states_explored: states,
            },
            None if shared.over_budget.load(Ordering::SeqCst) => SearchOutcome::Inconclusive { states_explored: states },
            None => SearchOutcome::ExhaustedUnsolvable { states_explored: states },
        };
        info!("search {} after {} states", outcome.label(), states);
        Ok(outcome)
    }

    /// Padded `n x mk` global matrix of an assigned subspace.
    fn global(&self, s: &Span) -> FieldMatrix {
        let dim = self.message_spans.len() * self.k;
        let mut m = FieldMatrix::zeros(self.n, dim, self.p);
        for (i, row) in s.rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Local matrices realizing the assigned global matrices: for each edge
    /// solve `sum_j A_j Y_j = Y_e` over the parents.
    fn reconstruct(&self, spaces: &[Span]) -> Result<FractionalCode, SearchError> {
        let (p, k, n) = (self.p, self.k, self.n);
        let globals: Vec<FieldMatrix> = spaces.iter().map(|s| self.global(s)).collect();
        let mut code = FractionalCode::new(k, n, p);
        let combine = |parents: &[usize], target: &FieldMatrix| -> Result<Vec<FieldMatrix>, SearchError> {
            let stacked = FieldMatrix::vstack(&parents.iter().map(|&q| globals[q].clone()).collect::<Vec<_>>()).map_err(CodeError::from)?;
            let x = stacked
                .transpose()
                .solve_right(&target.transpose())
                .map_err(CodeError::from)?
                .ok_or_else(|| SearchError::WitnessRejected("target outside parent span".into()))?
                .transpose();
            Ok((0..parents.len()).map(|i| x.submatrix(0, i * n, x.rows(), n)).collect())
        };
        for (pos, id) in self.edge_ids.iter().enumerate() {
            let rule = code.edge_rules.entry(id.clone()).or_default();
            match &self.inputs[pos] {
                Input::Source(j) => {
                    let msg = self.net.messages()[*j].clone();
                    rule.insert(InputRef::Source(msg), globals[pos].submatrix(0, j * k, n, k));
                }
                Input::Parents(ps) if ps.is_empty() => {}
                Input::Parents(ps) => {
                    for (&q, a) in ps.iter().zip(combine(ps, &globals[pos])?) {
                        rule.insert(InputRef::edge(&self.edge_ids[q]), a);
                    }
                }
            }
        }
        let dim = self.message_spans.len() * k;
        for (t, node) in self.terminals.iter().zip(self.net.terminals()) {
            let mut target = FieldMatrix::zeros(k, dim, p);
            for i in 0..k {
                target.set(i, t.demand * k + i, 1);
            }
            let rule = code.decode_rules.entry(node.id.clone()).or_default();
            if t.parents.is_empty() {
                continue;
            }
            for (&q, d) in t.parents.iter().zip(combine(&t.parents, &target)?) {
                rule.insert(InputRef::edge(&self.edge_ids[q]), d);
            }
        }
        let report = verify(self.net, &code)?;
        if !report.pass {
            return Err(SearchError::WitnessRejected(format!("failing terminals {:?}", report.failing_ids())));
        }
        Ok(code)
    }
}

fn run(net: &CodedNetwork, k: usize, n: usize, p: PrimeModulus, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let plan = Plan::new(net, k, n, p)?;
    info!("searching {} for a ({k},{n}) code over GF({})", net.name(), p.get());
    plan.search(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_fano, gen_nonfano};
    use crate::network::{NetEdge, NetNode};

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn unicast() -> CodedNetwork {
        CodedNetwork::new(
            "pair",
            vec!["x".into()],
            vec![NetNode::source("s", "x"), NetNode::terminal("t", "x")],
            vec![NetEdge::new("s", "t")],
        )
    }

    fn butterfly() -> CodedNetwork {
        CodedNetwork::new(
            "butterfly",
            vec!["a".into(), "b".into()],
            vec![
                NetNode::source("sa", "a"),
                NetNode::source("sb", "b"),
                NetNode::intermediate("m"),
                NetNode::intermediate("w"),
                NetNode::terminal("ta", "a"),
                NetNode::terminal("tb", "b"),
            ],
            vec![
                NetEdge::new("sa", "m"),
                NetEdge::new("sb", "m"),
                NetEdge::new("m", "w"),
                NetEdge::new("w", "ta"),
                NetEdge::new("w", "tb"),
                NetEdge::new("sa", "tb"),
                NetEdge::new("sb", "ta"),
            ],
        )
    }

    #[test]
    fn decodable_examples() {
        let p = gf(2);
        // coordinates: b, z
        assert!(decodable(&[vec![1, 0]], 0, p));
        assert!(!decodable(&[vec![1, 1]], 0, p));
        assert!(decodable(&[vec![1, 1], vec![0, 1]], 0, p));
        assert!(!decodable(&[], 0, p));
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let p = gf(2);
        let mut full = Span::default();
        for i in 0..4 {
            let mut v = vec![0; 4];
            v[i] = 1;
            full.insert(v, p);
        }
        assert_eq!(full.subspaces(1, p).len(), 15);
        assert_eq!(full.subspaces(2, p).len(), 35);
        assert_eq!(full.subspaces(4, p).len(), 1);
        assert_eq!(full.subspaces(1, gf(3)).len(), 40);
        let all = full.subspaces(2, p);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.dim(), 2);
            for b in &all[i + 1..] {
                assert!(!b.rows.iter().all(|r| a.contains(r.clone(), p)), "duplicate subspace");
            }
        }
    }

    #[test]
    fn unicast_is_solvable_everywhere() {
        for p in [2, 3, 5] {
            let out = search_scalar(&unicast(), gf(p), &SearchConfig::default()).unwrap();
            assert!(out.is_solvable());
        }
    }

    #[test]
    fn butterfly_is_solvable() {
        let out = search_scalar(&butterfly(), gf(2), &SearchConfig::default()).unwrap();
        let code = out.code().unwrap();
        assert!(verify(&butterfly(), code).unwrap().pass);
    }

    #[test]
    fn unreachable_demand_is_unsolvable_without_search() {
        let net = CodedNetwork::new(
            "cut",
            vec!["x".into(), "y".into()],
            vec![NetNode::source("s", "x"), NetNode::source("r", "y"), NetNode::terminal("t", "y")],
            vec![NetEdge::new("s", "t")],
        );
        let out = search_scalar(&net, gf(2), &SearchConfig::default()).unwrap();
        assert_eq!(out, SearchOutcome::ExhaustedUnsolvable { states_explored: 0 });
    }

    #[test]
    fn fano_and_nonfano_small_primes() {
        let cfg = SearchConfig::default();
        assert!(search_scalar(&gen_fano(), gf(2), &cfg).unwrap().is_solvable());
        assert!(matches!(search_scalar(&gen_fano(), gf(3), &cfg).unwrap(), SearchOutcome::ExhaustedUnsolvable { .. }));
        assert!(matches!(search_scalar(&gen_nonfano(), gf(2), &cfg).unwrap(), SearchOutcome::ExhaustedUnsolvable { .. }));
        assert!(search_scalar(&gen_nonfano(), gf(3), &cfg).unwrap().is_solvable());
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let cfg = SearchConfig {
            node_budget: 1,
            ..SearchConfig::default()
        };
        let out = search_scalar(&gen_fano(), gf(3), &cfg).unwrap();
        assert_eq!(out, SearchOutcome::Inconclusive { states_explored: 1 });
    }

    #[test]
    fn decision_independent_of_workers() {
        for workers in [1, 2, 4] {
            let cfg = SearchConfig {
                worker_count: workers,
                ..SearchConfig::default()
            };
            assert!(search_scalar(&gen_nonfano(), gf(3), &cfg).unwrap().is_solvable());
            assert!(!search_scalar(&gen_nonfano(), gf(2), &cfg).unwrap().is_solvable());
        }
    }

    #[test]
    fn single_worker_witness_is_deterministic() {
        let cfg = SearchConfig::default();
        let a = search_scalar(&gen_fano(), gf(2), &cfg).unwrap();
        let b = search_scalar(&gen_fano(), gf(2), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fractional_needs_opt_in() {
        let cfg = SearchConfig::default();
        assert!(matches!(
            search_fractional(&unicast(), 1, 2, gf(2), &cfg),
            Err(SearchError::FractionalDisabled { k: 1, n: 2 })
        ));
        let a = search_fractional(&gen_fano(), 1, 1, gf(2), &cfg).unwrap();
        assert_eq!(a, search_scalar(&gen_fano(), gf(2), &cfg).unwrap());
        let cfg = SearchConfig {
            enable_fractional: true,
            ..cfg
        };
        let out = search_fractional(&unicast(), 2, 2, gf(3), &cfg).unwrap();
        assert!(verify(&unicast(), out.code().unwrap()).unwrap().pass);
    }

    #[test]
    fn json_shape() {
        let out = search_scalar(&unicast(), gf(2), &SearchConfig::default()).unwrap();
        let v = out.to_json();
        assert_eq!(v["outcome"], "solvable");
        assert_eq!(v["code"]["p"], 2);
        let v = SearchOutcome::Inconclusive { states_explored: 7 }.to_json();
        assert_eq!(v, json!({"outcome": "inconclusive", "states": 7}));
    }
}
