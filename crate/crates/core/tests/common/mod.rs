//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use ncchar_core::network::{CodedNetwork, NetEdge, NetNode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A random valid network with at most `max_edges` edges and at most
/// `max_messages` messages, one source per message.
pub fn random_dag(rng: &mut StdRng, max_edges: usize, max_messages: usize) -> CodedNetwork {
    loop {
        let m = rng.gen_range(1..=max_messages);
        let inter = rng.gen_range(0..=2);
        let terms = rng.gen_range(1..=3);
        let messages: Vec<String> = (0..m).map(|j| format!("x{j}")).collect();
        // Node order doubles as a topological order: sources, intermediates, terminals.
        let mut nodes = Vec::new();
        let mut ids = Vec::new();
        for (j, msg) in messages.iter().enumerate() {
            let id = format!("s{j}");
            nodes.push(NetNode::source(&id, msg.as_str()));
            ids.push((id, 0));
        }
        for i in 0..inter {
            let id = format!("v{i}");
            nodes.push(NetNode::intermediate(&id));
            ids.push((id, 1));
        }
        for t in 0..terms {
            let id = format!("t{t}");
            let demand = &messages[rng.gen_range(0..m)];
            nodes.push(NetNode::terminal(&id, demand.as_str()));
            ids.push((id, 2));
        }
        let mut pairs = Vec::new();
        for (a, (_, ra)) in ids.iter().enumerate() {
            for (b, (_, rb)) in ids.iter().enumerate().skip(a + 1) {
                if *ra != 2 && *rb != 0 {
                    pairs.push((a, b));
                }
            }
        }
        let want = rng.gen_range(1..=max_edges).min(pairs.len());
        let mut edges = Vec::new();
        while edges.len() < want {
            let (a, b) = pairs.swap_remove(rng.gen_range(0..pairs.len()));
            edges.push(NetEdge::new(&ids[a].0, &ids[b].0));
        }
        let net = CodedNetwork::new("random", messages.iter().map(|m| m.as_str().into()).collect(), nodes, edges);
        if net.validate().is_valid() {
            return net;
        }
    }
}

/// Number of scalar local coefficients of a network: one per (edge, input).
pub fn local_coefficient_count(net: &CodedNetwork) -> usize {
    net.edges()
        .iter()
        .map(|e| {
            let node = net.node(&e.tail).unwrap();
            usize::from(node.generates().is_some()) + net.in_degree(&e.tail)
        })
        .sum()
}

/// Brute force over GF(2): tries every assignment of every local scalar
/// coefficient and, per assignment, every decoder at every terminal.
/// Vectors are bitmasks over the messages.
pub fn raw_scalar_solvable_gf2(net: &CodedNetwork) -> bool {
    let order = net.edge_order().unwrap();
    let index = |id: &str| order.iter().position(|e| e.id == id).unwrap();
    let msg_bit = |m: &str| 1u32 << net.messages().iter().position(|x| x.as_str() == m).unwrap();

    // Per edge: its inputs as either a message bit or a parent edge index.
    let mut inputs: Vec<Vec<Result<u32, usize>>> = Vec::new();
    for e in &order {
        let tail = net.node(&e.tail).unwrap();
        let mut ins = Vec::new();
        if let Some(m) = tail.generates() {
            ins.push(Ok(msg_bit(m.as_str())));
        }
        for pe in net.in_edges(&e.tail) {
            ins.push(Err(index(&pe.id)));
        }
        inputs.push(ins);
    }
    let total: usize = inputs.iter().map(Vec::len).sum();
    assert!(total < 24, "too many coefficients for brute force");
    let terminals: Vec<(Vec<usize>, u32)> = net
        .terminals()
        .map(|t| (net.in_edges(&t.id).map(|e| index(&e.id)).collect(), msg_bit(t.demands().unwrap().as_str())))
        .collect();

    for assignment in 0u64..(1 << total) {
        let mut bit = 0;
        let mut global = vec![0u32; order.len()];
        for (i, ins) in inputs.iter().enumerate() {
            let mut v = 0;
            for input in ins {
                if assignment >> bit & 1 == 1 {
                    v ^= match *input {
                        Ok(m) => m,
                        Err(parent) => global[parent],
                    };
                }
                bit += 1;
            }
            global[i] = v;
        }
        let all_decode = terminals.iter().all(|(parents, demand)| {
            (0u32..(1 << parents.len())).any(|dec| {
                let got = parents.iter().enumerate().filter(|(j, _)| dec >> j & 1 == 1).fold(0, |acc, (_, &e)| acc ^ global[e]);
                got == *demand
            })
        });
        if all_decode {
            return true;
        }
    }
    false
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
