//! Semantic summarisation of contract ASTs.
//!
//! Reduces a validated [`ContractAst`] to the buckets the trap detectors
//! consume:
//!
//! - `S` — state variables grouped by type: `s_a` (addresses and address
//!   lists), `s_i` (mutable integers), `s_b` (booleans), `s_c` (constants);
//! - `F` — the transfer slice: `transfer` / `transferFrom` plus everything
//!   transitively reachable through resolved calls and attached modifiers;
//! - `I` — transfer inputs `i_s` (sender), `i_r` (recipient), `i_a`
//!   (amount), identified by parameter position and type;
//! - `N` — end nodes (`require` / `assert` / `revert` / `return`) inside `F`;
//! - `B` — functions guarded by a caller-address check (backdoor surface);
//! - `C` — low-level external call sites;
//! - `call_graph` — directed call edges over `F`, modifier edges included;
//! - `deps` — the dependant closure: for every declaration, the set of
//!   declarations its value flows into (assignments, arithmetic, mapping
//!   reads, call arguments, and returned values).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::parse::{ContractAst, Node, NodeKind};

/// Per-document semantic summary; field names follow the bucket vocabulary
/// documented on the module.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticSummary {
    /// Address-typed state variables, scalar or list.
    pub s_a: BTreeSet<u32>,
    /// Mutable integer state variables.
    pub s_i: BTreeSet<u32>,
    /// Boolean state variables.
    pub s_b: BTreeSet<u32>,
    /// Constant declarations.
    pub s_c: BTreeSet<u32>,
    /// The transfer slice: function and modifier ids.
    pub f: BTreeSet<u32>,
    /// Sender input roots (one per declaring entry function).
    pub i_s: BTreeSet<u32>,
    /// Recipient input roots.
    pub i_r: BTreeSet<u32>,
    /// Amount input roots.
    pub i_a: BTreeSet<u32>,
    /// End nodes inside the transfer slice.
    pub n: BTreeSet<u32>,
    /// Functions whose body (or attached modifier) compares the caller
    /// address before proceeding.
    pub b: BTreeSet<u32>,
    /// Low-level external call nodes, document-wide.
    pub c: BTreeSet<u32>,
    /// Call edges over `f`; modifier attachments appear as edges too.
    pub call_graph: BTreeSet<(u32, u32)>,
    /// Declaration id -> all declaration ids its value reaches (reflexive:
    /// every set contains its own root).
    pub deps: BTreeMap<u32, BTreeSet<u32>>,
}

impl SemanticSummary {
    /// Dependants of `root`, falling back to the root alone for ids outside
    /// the computed map.
    pub fn dependants(&self, root: u32) -> BTreeSet<u32> {
        self.deps
            .get(&root)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([root]))
    }

    /// Union of dependants over a set of roots.
    pub fn dependants_of(&self, roots: &BTreeSet<u32>) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for &r in roots {
            out.extend(self.dependants(r));
        }
        out
    }
}

/// A value slot in the dataflow graph: either a declaration or the return
/// channel of a function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Slot {
    Decl(u32),
    Ret(u32),
}

/// Entry-point names that seed the transfer slice.
const TRANSFER_ENTRY_NAMES: [&str; 2] = ["transfer", "transferFrom"];

/// Name of the caller builtin as it appears in identifier nodes.
const CALLER_BUILTIN: &str = "msg.sender";

/// Name reserved for constructors.
const CONSTRUCTOR_NAME: &str = "constructor";

fn is_decl(node: &Node) -> bool {
    matches!(node.kind, NodeKind::StateVar | NodeKind::Parameter)
}

fn is_callable(node: &Node) -> bool {
    matches!(node.kind, NodeKind::Function | NodeKind::Modifier)
}

/// Ordered parameter declarations of a function or modifier.
pub(crate) fn params_of(ast: &ContractAst, callable: u32) -> Vec<u32> {
    ast.node(callable)
        .children
        .iter()
        .copied()
        .filter(|&c| ast.node(c).kind == NodeKind::Parameter)
        .collect()
}

/// Modifier attachments on a function: identifier children whose reference
/// resolves to a modifier declaration.
fn attachments_of(ast: &ContractAst, function: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for &child in &ast.node(function).children {
        if ast.node(child).kind != NodeKind::Identifier {
            continue;
        }
        if let Some(target) = ast.resolved_ref(child) {
            if ast.node(target).kind == NodeKind::Modifier {
                out.push((child, target));
            }
        }
    }
    out
}

/// Body block of a function or modifier (the last block child).
fn body_of(ast: &ContractAst, callable: u32) -> Option<u32> {
    ast.node(callable)
        .children
        .iter()
        .copied()
        .rev()
        .find(|&c| ast.node(c).kind == NodeKind::Block)
}

/// Declaration slots read by an expression subtree: resolved identifier
/// references plus, for embedded calls, the callee's return channel.
/// Mapping accesses contribute both the container and the key.
fn expr_slots(ast: &ContractAst, expr: u32) -> Vec<Slot> {
    let mut out = Vec::new();
    for id in ast.descendants(expr) {
        let node = ast.node(id);
        match node.kind {
            NodeKind::Identifier => {
                if let Some(target) = ast.resolved_ref(id) {
                    if is_decl(ast.node(target)) {
                        out.push(Slot::Decl(target));
                    }
                }
            }
            NodeKind::Call | NodeKind::LowLevelCall => {
                if let Some(target) = ast.resolved_ref(id) {
                    if is_callable(ast.node(target)) {
                        out.push(Slot::Ret(target));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Declaration slots written by an assignment target.  A mapping write
/// updates the container; the key only selects the cell, so it is not a
/// value sink.
fn target_slots(ast: &ContractAst, target: u32) -> Vec<Slot> {
    let node = ast.node(target);
    match node.kind {
        NodeKind::Identifier => ast
            .resolved_ref(target)
            .filter(|&t| is_decl(ast.node(t)))
            .map(|t| vec![Slot::Decl(t)])
            .unwrap_or_default(),
        NodeKind::MemberAccess => node
            .children
            .first()
            .map(|&container| target_slots(ast, container))
            .unwrap_or_default(),
        _ => Vec::new(),
    }
}

/// True when the subtree rooted at `id` contains a caller-address guard:
/// a `require`/`assert` whose condition mentions the caller builtin, or an
/// `if` on the caller builtin wrapping a `revert`.
fn has_caller_guard(ast: &ContractAst, root: u32) -> bool {
    for id in ast.descendants(root) {
        let node = ast.node(id);
        let cond = match node.kind {
            NodeKind::Require | NodeKind::Assert | NodeKind::If => match node.children.first() {
                Some(&c) => c,
                None => continue,
            },
            _ => continue,
        };
        let mentions_caller = ast.descendants(cond).iter().any(|&d| {
            let n = ast.node(d);
            n.kind == NodeKind::Identifier && n.name == CALLER_BUILTIN
        });
        if !mentions_caller {
            continue;
        }
        match node.kind {
            NodeKind::Require | NodeKind::Assert => return true,
            NodeKind::If => {
                let reverts = ast
                    .descendants(id)
                    .iter()
                    .any(|&d| ast.node(d).kind == NodeKind::Revert);
                if reverts {
                    return true;
                }
            }
            _ => {}
        }
    }
    false
}

/// All function declarations in the document, in id order.
fn all_functions(ast: &ContractAst) -> Vec<u32> {
    ast.node_ids()
        .filter(|&id| ast.node(id).kind == NodeKind::Function)
        .collect()
}

/// All callables (functions and modifiers) in id order.
fn all_callables(ast: &ContractAst) -> Vec<u32> {
    ast.node_ids()
        .filter(|&id| is_callable(ast.node(id)))
        .collect()
}

/// Build the dataflow edges between value slots.
fn dataflow_edges(ast: &ContractAst) -> BTreeMap<Slot, BTreeSet<Slot>> {
    let mut edges: BTreeMap<Slot, BTreeSet<Slot>> = BTreeMap::new();
    let mut add = |from: Slot, to: Slot| {
        if from != to {
            edges.entry(from).or_default().insert(to);
        }
    };

    for callable in all_callables(ast) {
        // Attachment arguments flow into modifier parameters.
        if ast.node(callable).kind == NodeKind::Function {
            for (attachment, modifier) in attachments_of(ast, callable) {
                let params = params_of(ast, modifier);
                let args = &ast.node(attachment).children;
                for (arg, param) in args.iter().zip(params.iter()) {
                    for slot in expr_slots(ast, *arg) {
                        add(slot, Slot::Decl(*param));
                    }
                }
            }
        }

        let Some(body) = body_of(ast, callable) else {
            continue;
        };
        for id in ast.descendants(body) {
            let node = ast.node(id);
            match node.kind {
                NodeKind::Assignment => {
                    let (Some(&target), Some(&value)) =
                        (node.children.first(), node.children.get(1))
                    else {
                        continue;
                    };
                    let sinks = target_slots(ast, target);
                    for source in expr_slots(ast, value) {
                        for &sink in &sinks {
                            add(source, sink);
                        }
                    }
                }
                NodeKind::Call | NodeKind::LowLevelCall => {
                    if let Some(target) = ast.resolved_ref(id) {
                        if is_callable(ast.node(target)) {
                            let params = params_of(ast, target);
                            for (arg, param) in node.children.iter().zip(params.iter()) {
                                for slot in expr_slots(ast, *arg) {
                                    add(slot, Slot::Decl(*param));
                                }
                            }
                        }
                    }
                }
                NodeKind::Return => {
                    if let Some(&expr) = node.children.first() {
                        for slot in expr_slots(ast, expr) {
                            add(slot, Slot::Ret(callable));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    edges
}

/// Forward reachability over the dataflow graph, reported per declaration.
fn dependant_closure(ast: &ContractAst) -> BTreeMap<u32, BTreeSet<u32>> {
    let edges = dataflow_edges(ast);
    let decls: Vec<u32> = ast.node_ids().filter(|&id| is_decl(ast.node(id))).collect();

    let mut out = BTreeMap::new();
    for &root in &decls {
        let mut seen: BTreeSet<Slot> = BTreeSet::new();
        let mut queue: VecDeque<Slot> = VecDeque::new();
        let start = Slot::Decl(root);
        seen.insert(start);
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            if let Some(nexts) = edges.get(&cur) {
                for &next in nexts {
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let reachable: BTreeSet<u32> = seen
            .into_iter()
            .filter_map(|s| match s {
                Slot::Decl(d) => Some(d),
                Slot::Ret(_) => None,
            })
            .collect();
        out.insert(root, reachable);
    }
    out
}

/// Classify transfer-entry parameters into sender / recipient / amount roots
/// by position and type: with a single address parameter it is the
/// recipient; with two or more, the first is the sender and the second the
/// recipient.  The first integer parameter is the amount.
fn classify_entry_inputs(
    ast: &ContractAst,
    entry: u32,
    i_s: &mut BTreeSet<u32>,
    i_r: &mut BTreeSet<u32>,
    i_a: &mut BTreeSet<u32>,
) {
    let params = params_of(ast, entry);
    let addresses: Vec<u32> = params
        .iter()
        .copied()
        .filter(|&p| ast.node(p).type_tag.is_address_like())
        .collect();
    match addresses.len() {
        0 => {}
        1 => {
            i_r.insert(addresses[0]);
        }
        _ => {
            i_s.insert(addresses[0]);
            i_r.insert(addresses[1]);
        }
    }
    if let Some(&amount) = params.iter().find(|&&p| ast.node(p).type_tag.is_integer()) {
        i_a.insert(amount);
    }
}

/// Compute the semantic summary of a validated document.
pub fn summarize(ast: &ContractAst) -> SemanticSummary {
    let mut summary = SemanticSummary::default();

    // S: state variables declared directly under a contract node.
    for contract in ast.contracts() {
        for &root in &contract.roots {
            if ast.node(root).kind != NodeKind::Contract {
                continue;
            }
            for &child in &ast.node(root).children {
                let node = ast.node(child);
                if node.kind != NodeKind::StateVar {
                    continue;
                }
                if node.constant {
                    summary.s_c.insert(child);
                } else if node.type_tag.is_address_like() {
                    summary.s_a.insert(child);
                } else if node.type_tag.is_integer() {
                    summary.s_i.insert(child);
                } else if node.type_tag == super::parse::TypeTag::Bool {
                    summary.s_b.insert(child);
                }
            }
        }
    }

    // F: transfer entries plus transitive callees and attached modifiers.
    let mut frontier: VecDeque<u32> = VecDeque::new();
    for id in all_functions(ast) {
        let name = ast.node(id).name.as_str();
        if TRANSFER_ENTRY_NAMES.contains(&name) {
            if summary.f.insert(id) {
                frontier.push_back(id);
            }
            classify_entry_inputs(
                ast,
                id,
                &mut summary.i_s,
                &mut summary.i_r,
                &mut summary.i_a,
            );
        }
    }
    while let Some(current) = frontier.pop_front() {
        for (_, modifier) in attachments_of(ast, current) {
            summary.call_graph.insert((current, modifier));
            if summary.f.insert(modifier) {
                frontier.push_back(modifier);
            }
        }
        let Some(body) = body_of(ast, current) else {
            continue;
        };
        for id in ast.descendants(body) {
            let node = ast.node(id);
            if !matches!(node.kind, NodeKind::Call | NodeKind::LowLevelCall) {
                continue;
            }
            if let Some(target) = ast.resolved_ref(id) {
                if is_callable(ast.node(target)) {
                    summary.call_graph.insert((current, target));
                    if summary.f.insert(target) {
                        frontier.push_back(target);
                    }
                }
            }
        }
    }

    // N: end nodes inside F bodies.
    for &member in &summary.f {
        let Some(body) = body_of(ast, member) else {
            continue;
        };
        for id in ast.descendants(body) {
            if matches!(
                ast.node(id).kind,
                NodeKind::Require | NodeKind::Assert | NodeKind::Revert | NodeKind::Return
            ) {
                summary.n.insert(id);
            }
        }
    }

    // B: caller-guarded functions (guard in own body or attached modifier).
    for id in all_functions(ast) {
        if ast.node(id).name == CONSTRUCTOR_NAME {
            continue;
        }
        let own = body_of(ast, id).is_some_and(|b| has_caller_guard(ast, b));
        let via_modifier = attachments_of(ast, id)
            .iter()
            .any(|&(_, m)| body_of(ast, m).is_some_and(|b| has_caller_guard(ast, b)));
        if own || via_modifier {
            summary.b.insert(id);
        }
    }

    // C: every low-level call site in the document.
    for id in ast.node_ids() {
        if ast.node(id).kind == NodeKind::LowLevelCall {
            summary.c.insert(id);
        }
    }

    summary.deps = dependant_closure(ast);
    summary
}

/// Writer analysis for a state variable: which callables assign it, split by
/// how an attacker could reach them.  Used by the detectors to decide
/// whether a variable is mutable through a backdoor, only at construction,
/// or publicly (the publicly fixable case produces no indicator).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WriterProfile {
    /// Caller-guarded functions assigning the variable.
    pub backdoor: Vec<u32>,
    /// Constructors assigning it.
    pub constructor: Vec<u32>,
    /// Functions assigning it that are callable from outside without a
    /// caller guard (directly or through a public caller chain).
    pub open: Vec<u32>,
    /// Remaining writers with no externally reachable path.
    pub unreachable: Vec<u32>,
}

/// Compute the [`WriterProfile`] of `var` over the whole document.
pub fn writer_profile(ast: &ContractAst, summary: &SemanticSummary, var: u32) -> WriterProfile {
    // Full call graph (not restricted to F) for reachability of writers.
    let mut callers: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for callable in all_callables(ast) {
        for (_, modifier) in attachments_of(ast, callable) {
            callers.entry(modifier).or_default().push(callable);
        }
        let Some(body) = body_of(ast, callable) else {
            continue;
        };
        for id in ast.descendants(body) {
            if matches!(ast.node(id).kind, NodeKind::Call | NodeKind::LowLevelCall) {
                if let Some(target) = ast.resolved_ref(id) {
                    if is_callable(ast.node(target)) {
                        callers.entry(target).or_default().push(callable);
                    }
                }
            }
        }
    }

    let externally_reachable = |start: u32| -> bool {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            let node = ast.node(cur);
            if node.kind == NodeKind::Function
                && node.name != CONSTRUCTOR_NAME
                && node.visibility.is_reachable_externally()
            {
                return true;
            }
            for &up in callers.get(&cur).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(up) {
                    queue.push_back(up);
                }
            }
        }
        false
    };

    let mut profile = WriterProfile::default();
    for callable in all_callables(ast) {
        let Some(body) = body_of(ast, callable) else {
            continue;
        };
        let writes = ast.descendants(body).into_iter().any(|id| {
            let node = ast.node(id);
            node.kind == NodeKind::Assignment
                && node
                    .children
                    .first()
                    .is_some_and(|&t| target_slots(ast, t).contains(&Slot::Decl(var)))
        });
        if !writes {
            continue;
        }
        let node = ast.node(callable);
        if node.kind == NodeKind::Function && node.name == CONSTRUCTOR_NAME {
            profile.constructor.push(callable);
        } else if summary.b.contains(&callable) {
            profile.backdoor.push(callable);
        } else if externally_reachable(callable) {
            profile.open.push(callable);
        } else {
            profile.unreachable.push(callable);
        }
    }
    profile
}

/// Unresolved low-level call sites in the contract owning `var`: calls whose
/// target source is unavailable, treated as a potential mutation path.
pub fn opaque_calls_near(ast: &ContractAst, var: u32) -> Vec<u32> {
    let owner = ast.owner(var);
    let mut out: Vec<u32> = ast
        .node_ids()
        .filter(|&id| {
            ast.node(id).kind == NodeKind::LowLevelCall
                && ast.owner(id) == owner
                && ast.resolved_ref(id).is_none()
        })
        .collect();
    out.sort_unstable();
    out
}
