//! Explicit `(1, n)` codes for N1 and N2, and their lifts to k-copy unions
//! and gadgeted networks.
//!
//! Every message `x_j` travels as `x_j e_j` (unit column `j` of an
//! `n`-vector). Most edges forward the sum of their inputs; the edges listed
//! in [`solve_n1`] / [`solve_n2`] subtract to cancel interference.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::code::{CodeError, InputRef, SymEntry, SymMatrix, SymbolicCode};
use crate::constructions::{
    copy_edge_id, gadget_transform, gadget_transform_logged, gen_n1, gen_n2, msg_a, msg_b, msg_c, union_copies, ConstructionError,
    Family, GadgetApplication, Recipe, Transform,
};
use crate::field::PrimeModulus;
use crate::network::{CodedNetwork, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("characteristic {p} does not divide q={q}; N1 needs a characteristic that divides q")]
    CharacteristicMustDivide { p: u64, q: u64 },
    #[error("characteristic {p} divides q={q}; N2 needs a characteristic that does not divide q")]
    CharacteristicMustNotDivide { p: u64, q: u64 },
    #[error("code does not fit the network: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn neg_identity(n: usize) -> SymMatrix {
    SymMatrix::diagonal(n, SymEntry::Int(-1))
}

/// Fills every edge without a rule with "sum of inputs": identity on each
/// in-edge of the tail, or the unit column `pos(message)` on a source.
fn fill_forwarding(code: &mut SymbolicCode, net: &CodedNetwork, pos: impl Fn(&str) -> usize) {
    let n = code.n;
    for e in net.edges() {
        if code.edge_rules.contains_key(&e.id) {
            continue;
        }
        let tail = net.node(&e.tail).expect("valid network");
        if let NodeKind::Source(m) = &tail.kind {
            code.set_edge_input(&e.id, InputRef::source(m), SymMatrix::unit_col(n, pos(m.as_str())));
        } else {
            let mut rule = BTreeMap::new();
            for pe in net.in_edges(&e.tail) {
                rule.insert(InputRef::edge(&pe.id), SymMatrix::identity(n));
            }
            code.edge_rules.insert(e.id.clone(), rule);
        }
    }
}

/// Every terminal reads coordinate `pos(demand)` of its single in-edge.
fn fill_unit_decoders(code: &mut SymbolicCode, net: &CodedNetwork, pos: impl Fn(&str) -> usize) {
    for t in net.terminals() {
        let demand = t.demands().expect("terminal").as_str();
        for e in net.in_edges(&t.id) {
            code.set_decode_input(&t.id, InputRef::edge(&e.id), SymMatrix::unit_row(code.n, pos(demand)));
        }
    }
}

/// Block index `j - 1` of a message named `a{j}`, `c{j}` or `b{i}_{j}`.
fn block_of(message: &str) -> usize {
    let j = match message.split_once('_') {
        Some((_, j)) => j,
        None => &message[1..],
    };
    j.parse::<usize>().expect("generated message name") - 1
}

/// `(1, n)` code for N1(q, n) with entries in {0, 1, -1}. It solves the
/// network exactly when the characteristic divides `q`; otherwise the `T_a`
/// terminals decode `a_j - q c_j`.
pub fn solve_n1(q: usize, n: usize) -> Result<SymbolicCode, SolutionError> {
    let net = gen_n1(q, n)?;
    let mut code = SymbolicCode::new(1, n, q as u64);
    let id = || SymMatrix::identity(n);
    let neg = || neg_identity(n);
    let bs = 1..q;

    // a - c
    code.set_edge_input("u5->u7", InputRef::edge("u3->u5"), id());
    code.set_edge_input("u5->u7", InputRef::edge("u4->u5"), neg());
    // a + b - c
    code.set_edge_input("u6->u8", InputRef::edge("u3->u6"), id());
    for j in 1..=n {
        code.set_edge_input("u6->u8", InputRef::edge(format!("{}->u6", msg_c(j))), neg());
    }
    // b
    code.set_edge_input("u9->u10", InputRef::edge("u8->u9"), id());
    code.set_edge_input("u9->u10", InputRef::edge("u7->u9"), neg());
    // c
    code.set_edge_input("u11->u12", InputRef::edge("u7->u11"), neg());
    for j in 1..=n {
        code.set_edge_input("u11->u12", InputRef::edge(format!("{}->u11", msg_a(j))), id());
    }
    // a - q c
    code.set_edge_input("u13->u14", InputRef::edge("u8->u13"), id());
    for i in bs.clone() {
        code.set_edge_input("u13->u14", InputRef::edge(format!("e{i}h->u13")), neg());
    }
    for i in bs.clone() {
        // b_i + c
        let e = format!("e{i}");
        code.set_edge_input(&e, InputRef::edge(format!("u4->e{i}t")), id());
        // b_i
        let v = format!("v{i}->v{i}p");
        code.set_edge_input(&v, InputRef::edge(format!("u10->v{i}")), id());
        // c
        let w = format!("w{i}->w{i}p");
        code.set_edge_input(&w, InputRef::edge(format!("e{i}h->w{i}")), id());
        for j in 1..=n {
            for k in bs.clone().filter(|&k| k != i) {
                code.set_edge_input(&e, InputRef::edge(format!("{}->e{i}t", msg_b(k, j))), neg());
                code.set_edge_input(&v, InputRef::edge(format!("{}->v{i}", msg_b(k, j))), neg());
            }
            code.set_edge_input(&w, InputRef::edge(format!("{}->w{i}", msg_b(i, j))), neg());
        }
    }

    fill_forwarding(&mut code, &net, block_of);
    fill_unit_decoders(&mut code, &net, block_of);
    debug_assert!(code.check(&net).is_ok());
    Ok(code)
}

/// `(1, n)` code for N2(q, n) using `q^{-1}` on `e_b'`. It solves the
/// network for every characteristic not dividing `q`.
pub fn solve_n2(q: usize, n: usize) -> Result<SymbolicCode, SolutionError> {
    let net = gen_n2(q, n)?;
    let mut code = SymbolicCode::new(1, n, q as u64);
    let id = || SymMatrix::identity(n);
    let neg = || neg_identity(n);

    // a
    code.set_edge_input("eap", InputRef::edge("eah->eapt"), id());
    code.set_edge_input("eap", InputRef::edge("ebh->eapt"), neg());
    // q^{-1} (sum e_i - (q-1) e_b) = a
    code.set_edge_input(
        "ebp",
        InputRef::edge("ebh->ebpt"),
        SymMatrix::diagonal(n, SymEntry::InvQ(-(q as i64 - 1))),
    );
    for i in 1..=q {
        code.set_edge_input("ebp", InputRef::edge(format!("e{i}h->ebpt")), SymMatrix::diagonal(n, SymEntry::InvQ(1)));
        // b_i
        let e = format!("e{i}p");
        code.set_edge_input(&e, InputRef::edge(format!("eah->e{i}pt")), id());
        code.set_edge_input(&e, InputRef::edge(format!("e{i}h->e{i}pt")), neg());
    }

    fill_forwarding(&mut code, &net, block_of);
    fill_unit_decoders(&mut code, &net, block_of);
    debug_assert!(code.check(&net).is_ok());
    Ok(code)
}

/// Lifts a `(k0, n)` code on a base network to a `(k k0, n)` code on
/// `union_copies(base, k)`: copy `i` carries symbol block `i` of every
/// merged source with the base matrices unchanged.
pub fn lift_union(sym: &SymbolicCode, k: usize) -> Result<SymbolicCode, SolutionError> {
    if k == 0 {
        return Err(ConstructionError::OutOfRange { name: "copies", value: k, min: 1 }.into());
    }
    let (k0, n) = (sym.k, sym.n);
    let mut out = SymbolicCode::new(k * k0, n, sym.q);
    for c in 1..=k {
        let rename = |input: &InputRef| match input {
            InputRef::Edge(e) => InputRef::edge(copy_edge_id(e, c)),
            src => src.clone(),
        };
        for (edge, rule) in &sym.edge_rules {
            for (input, m) in rule {
                let m = match input {
                    InputRef::Source(_) => SymMatrix::embed(n, k * k0, 0, (c - 1) * k0, m),
                    InputRef::Edge(_) => m.clone(),
                };
                out.set_edge_input(copy_edge_id(edge, c), rename(input), m);
            }
        }
        for (terminal, rule) in &sym.decode_rules {
            for (input, m) in rule {
                out.set_decode_input(terminal, rename(input), SymMatrix::embed(k * k0, n, (c - 1) * k0, 0, m));
            }
        }
    }
    Ok(out)
}

/// Extends a `(1, n)` code on `base` to `gadgeted = gadget_transform(base, n)`.
pub fn lift_gadget(sym: &SymbolicCode, base: &CodedNetwork, gadgeted: &CodedNetwork) -> Result<SymbolicCode, SolutionError> {
    if sym.k != 1 {
        return Err(SolutionError::Mismatch(format!("gadget lifting needs k=1, code has k={}", sym.k)));
    }
    sym.check(base)?;
    let (expected, log) = gadget_transform_logged(base, sym.n)?;
    if &expected != gadgeted {
        return Err(SolutionError::Mismatch(format!(
            "network is not the n={} gadget transform of the base",
            sym.n
        )));
    }
    let mut code = sym.clone();
    for app in &log {
        apply_gadget(&mut code, app)?;
    }
    code.check(gadgeted)?;
    Ok(code)
}

fn apply_gadget(code: &mut SymbolicCode, app: &GadgetApplication) -> Result<(), SolutionError> {
    let n = code.n;
    let take_decoder = |code: &mut SymbolicCode, t: &str| {
        code.decode_rules
            .remove(t)
            .ok_or_else(|| SolutionError::Mismatch(format!("no decode rule for {t}")))
    };
    // The demoted terminals now forward their decoded b in coordinate 0.
    for (from, to) in [(&app.n1, &app.x2), (&app.n2, &app.x5)] {
        let edge = format!("{from}->{to}");
        for (input, d) in take_decoder(code, from)? {
            code.set_edge_input(&edge, input, SymMatrix::embed(n, n, 0, 0, &d));
        }
    }
    let x2_in = format!("{}->{}", app.x1, app.x2);
    code.set_edge_input(&x2_in, InputRef::source(&app.z), SymMatrix::unit_col(n, 0));
    let mut bottleneck_inputs = vec![format!("{}->{}", app.n1, app.x2), x2_in];
    for (i, (s, y)) in app.side_sources.iter().enumerate() {
        let e = format!("{s}->{}", app.x2);
        code.set_edge_input(&e, InputRef::source(y), SymMatrix::unit_col(n, i + 1));
        bottleneck_inputs.push(e);
    }
    // [b + z, y_1, ..., y_{n-1}]
    let bottleneck = app.bottleneck_edge();
    for e in bottleneck_inputs {
        code.set_edge_input(&bottleneck, InputRef::edge(e), SymMatrix::identity(n));
    }
    let outs = [&app.x4, &app.x5].into_iter().chain(&app.side_terminals);
    for t in outs {
        code.set_edge_input(format!("{}->{t}", app.x3), InputRef::edge(&bottleneck), SymMatrix::identity(n));
    }
    let direct_z = format!("{}->{}", app.x1, app.x4);
    code.set_edge_input(&direct_z, InputRef::source(&app.z), SymMatrix::unit_col(n, 0));

    let minus_first = SymMatrix::embed(1, n, 0, 0, &SymMatrix::diagonal(1, SymEntry::Int(-1)));
    code.set_decode_input(&app.x4, InputRef::edge(format!("{}->{}", app.x3, app.x4)), SymMatrix::unit_row(n, 0));
    code.set_decode_input(&app.x4, InputRef::edge(direct_z), minus_first.clone());
    code.set_decode_input(&app.x5, InputRef::edge(format!("{}->{}", app.x3, app.x5)), SymMatrix::unit_row(n, 0));
    code.set_decode_input(&app.x5, InputRef::edge(format!("{}->{}", app.n2, app.x5)), minus_first);
    for (i, t) in app.side_terminals.iter().enumerate() {
        code.set_decode_input(t, InputRef::edge(format!("{}->{t}", app.x3)), SymMatrix::unit_row(n, i + 1));
    }
    Ok(())
}

/// Rejects characteristics for which the family's code does not exist:
/// N1 needs `p | q`, N2 needs `p` not dividing `q`.
pub fn check_characteristic(family: Family, q: usize, p: PrimeModulus) -> Result<(), SolutionError> {
    let (p, q) = (p.get(), q as u64);
    match (family, q.is_multiple_of(p)) {
        (Family::N1, false) => Err(SolutionError::CharacteristicMustDivide { p, q }),
        (Family::N2, true) => Err(SolutionError::CharacteristicMustNotDivide { p, q }),
        _ => Ok(()),
    }
}

/// The symbolic code for the network a recipe builds, lifted through each
/// transform in order.
pub fn solve_recipe(recipe: &Recipe) -> Result<SymbolicCode, SolutionError> {
    let (mut net, mut code) = match recipe.family {
        Family::N1 => (gen_n1(recipe.q, recipe.n)?, solve_n1(recipe.q, recipe.n)?),
        Family::N2 => (gen_n2(recipe.q, recipe.n)?, solve_n2(recipe.q, recipe.n)?),
    };
    for t in &recipe.transforms {
        match *t {
            Transform::Union(k) => {
                code = lift_union(&code, k)?;
                net = union_copies(&net, k)?;
            }
            Transform::Gadget(g) => {
                if g != code.n {
                    return Err(SolutionError::Mismatch(format!("gadget n={g} differs from code block length n={}", code.n)));
                }
                let next = gadget_transform(&net, g)?;
                code = lift_gadget(&code, &net, &next)?;
                net = next;
            }
        }
    }
    Ok(code)
}
