//! Trap indicator detection over semantic summaries.
//!
//! Each rule looks for a state variable standing between the transfer
//! inputs and a failing end node (or a fee computation), reachable only
//! through an owner-guarded mutator, an opaque external call, or — for
//! permission lists — construction alone.  A publicly writable variable is
//! not a trap: anyone could repair it, so it produces no indicator.
//!
//! Rules by category:
//! - **EP** — an address variable or list checked against the transfer's
//!   sender/recipient in an end node;
//! - **ES** — a managed boolean gating an end node, within two conditional
//!   nests of the assertion;
//! - **AL** — a managed integer compared with the transfer amount (or a
//!   value derived from it) in an end node;
//! - **FM** — a managed integer or constant feeding an update of the
//!   transferred amount, evidence anchored at the updating assignment;
//! - **IC** — a call-graph cycle whose entry input is checked against a
//!   managed variable in an end node.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::tokenvm::Category;

use super::graph::find_cycles;
use super::parse::{ContractAst, NodeKind, TypeTag};
use super::summary::{opaque_calls_near, params_of, writer_profile, SemanticSummary};

/// How the implicated variable can change after deployment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutability {
    /// Through a caller-guarded function.
    Backdoor,
    /// Through an opaque low-level call into unavailable code.
    ExternalCall,
    /// Not at all: fixed at construction with no public update path.
    ConstructorOnly,
}

/// Where and how an indicator was established.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Evidence {
    /// The end node (or, for fee manipulation, the amount-updating
    /// assignment) that anchors the finding.
    pub end_node_id: u32,
    /// The mutator: a backdoor function name, an external-call node id, or
    /// `constructor`.
    pub mutator: String,
    pub via: Mutability,
}

/// One detected trap indicator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Indicator {
    pub category: Category,
    /// The implicated declaration: trap variable name, fee variable name,
    /// or cycle function name.
    pub identifier: String,
    pub evidence: Evidence,
}

/// How far an enclosing `if` may sit from an assertion and still be treated
/// as its gate.
const SUSPENSION_ASSOCIATION_DISTANCE: usize = 2;

/// Resolution of a variable's update paths, in rule priority order.
enum Management {
    Backdoor { name: String },
    External { call: u32 },
    ConstructorOnly,
    Open,
}

fn management(ast: &ContractAst, summary: &SemanticSummary, var: u32) -> Management {
    let profile = writer_profile(ast, summary, var);
    if let Some(&writer) = profile.backdoor.first() {
        return Management::Backdoor {
            name: ast.node(writer).name.clone(),
        };
    }
    if let Some(&call) = opaque_calls_near(ast, var).first() {
        return Management::External { call };
    }
    if profile.open.is_empty() {
        Management::ConstructorOnly
    } else {
        Management::Open
    }
}

impl Management {
    /// Evidence fragment for rules accepting backdoor or external mutation.
    fn guarded_evidence(&self) -> Option<(String, Mutability)> {
        match self {
            Management::Backdoor { name } => Some((name.clone(), Mutability::Backdoor)),
            Management::External { call } => Some((call.to_string(), Mutability::ExternalCall)),
            _ => None,
        }
    }

    /// Evidence fragment for the permission rule, which additionally
    /// accepts construction-fixed variables.
    fn permission_evidence(&self) -> Option<(String, Mutability)> {
        match self {
            Management::ConstructorOnly => {
                Some(("constructor".into(), Mutability::ConstructorOnly))
            }
            _ => self.guarded_evidence(),
        }
    }
}

/// Declarations read by an expression, mapping containers excluded: a value
/// that has sunk into a mapping cell is ledger state, not a comparison
/// operand.
fn condition_decls(ast: &ContractAst, exprs: &[u32]) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for &expr in exprs {
        for id in ast.descendants(expr) {
            let node = ast.node(id);
            if node.kind != NodeKind::Identifier {
                continue;
            }
            if let Some(target) = ast.resolved_ref(id) {
                let decl = ast.node(target);
                if matches!(decl.kind, NodeKind::StateVar | NodeKind::Parameter)
                    && decl.type_tag != TypeTag::Mapping
                {
                    out.insert(target);
                }
            }
        }
    }
    out
}

/// Conditions of `if` nodes enclosing `end`, innermost first, up to `max`
/// of them, stopping at the function boundary.
fn guarding_conditions(ast: &ContractAst, end: u32, max: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut cur = end;
    while out.len() < max {
        let Some(parent) = ast.parent(cur) else { break };
        let node = ast.node(parent);
        match node.kind {
            NodeKind::If => {
                if let Some(&cond) = node.children.first() {
                    out.push(cond);
                }
            }
            NodeKind::Function | NodeKind::Modifier => break,
            _ => {}
        }
        cur = parent;
    }
    out
}

/// The predicate decls an end node asserts on: its own condition for
/// `require`/`assert`, or the immediately guarding `if` for bare
/// `revert`/`return`.
fn asserted_decls(ast: &ContractAst, end: u32) -> BTreeSet<u32> {
    let node = ast.node(end);
    match node.kind {
        NodeKind::Require | NodeKind::Assert => condition_decls(
            ast,
            node.children
                .first()
                .map(std::slice::from_ref)
                .unwrap_or(&[]),
        ),
        NodeKind::Revert | NodeKind::Return => {
            condition_decls(ast, &guarding_conditions(ast, end, 1))
        }
        _ => BTreeSet::new(),
    }
}

/// The wider association set used by the suspension rule: the end node's
/// own condition plus enclosing `if` conditions within the association
/// distance.
fn associated_decls(ast: &ContractAst, end: u32) -> BTreeSet<u32> {
    let mut out = asserted_decls(ast, end);
    out.extend(condition_decls(
        ast,
        &guarding_conditions(ast, end, SUSPENSION_ASSOCIATION_DISTANCE),
    ));
    out
}

/// Mapping-container-free dependants of a root set, for matching derived
/// values in conditions.
fn flowing_dependants(
    ast: &ContractAst,
    summary: &SemanticSummary,
    roots: &BTreeSet<u32>,
) -> BTreeSet<u32> {
    summary
        .dependants_of(roots)
        .into_iter()
        .filter(|&d| ast.node(d).type_tag != TypeTag::Mapping)
        .collect()
}

/// Run all five rules over a summarized document.  Findings are
/// deduplicated by `(category, identifier)` — the lowest-id evidence wins —
/// and returned in canonical order: category first, identifier second.
pub fn detect_indicators(ast: &ContractAst, summary: &SemanticSummary) -> Vec<Indicator> {
    let mut found: BTreeMap<(Category, String), Indicator> = BTreeMap::new();
    let mut record = |category: Category, identifier: String, evidence: Evidence| {
        found
            .entry((category, identifier.clone()))
            .or_insert(Indicator {
                category,
                identifier,
                evidence,
            });
    };

    let sender_recipient_deps = {
        let mut roots = summary.i_s.clone();
        roots.extend(&summary.i_r);
        flowing_dependants(ast, summary, &roots)
    };
    let amount_deps = flowing_dependants(ast, summary, &summary.i_a);

    // End-node rules: permission, suspension, amount limit.
    for &end in &summary.n {
        let asserted = asserted_decls(ast, end);
        if !asserted.is_empty() {
            let meets_inputs = asserted
                .intersection(&sender_recipient_deps)
                .next()
                .is_some();
            for &a in summary.s_a.iter().filter(|a| asserted.contains(a)) {
                if !meets_inputs {
                    continue;
                }
                if let Some((mutator, via)) = management(ast, summary, a).permission_evidence() {
                    record(
                        Category::Permission,
                        ast.node(a).name.clone(),
                        Evidence {
                            end_node_id: end,
                            mutator,
                            via,
                        },
                    );
                }
            }
            let meets_amount = asserted.intersection(&amount_deps).next().is_some();
            for &v in summary.s_i.iter().filter(|v| asserted.contains(v)) {
                if !meets_amount {
                    continue;
                }
                if let Some((mutator, via)) = management(ast, summary, v).guarded_evidence() {
                    record(
                        Category::AmountLimit,
                        ast.node(v).name.clone(),
                        Evidence {
                            end_node_id: end,
                            mutator,
                            via,
                        },
                    );
                }
            }
        }

        let associated = associated_decls(ast, end);
        for &b in summary.s_b.iter().filter(|b| associated.contains(b)) {
            if let Some((mutator, via)) = management(ast, summary, b).guarded_evidence() {
                record(
                    Category::Suspension,
                    ast.node(b).name.clone(),
                    Evidence {
                        end_node_id: end,
                        mutator,
                        via,
                    },
                );
            }
        }
    }

    // Fee manipulation: a managed integer (or constant) flowing into an
    // assignment that updates an amount-derived scalar inside the transfer
    // slice.
    let fee_sources: Vec<u32> = summary
        .s_i
        .iter()
        .chain(summary.s_c.iter())
        .copied()
        .collect();
    let mut fee_assignments: Vec<u32> = Vec::new();
    for &member in &summary.f {
        for id in ast.descendants(member) {
            if ast.node(id).kind == NodeKind::Assignment
                && ast.enclosing_callable(id) == Some(member)
            {
                fee_assignments.push(id);
            }
        }
    }
    fee_assignments.sort_unstable();
    for assignment in fee_assignments {
        let node = ast.node(assignment);
        let (Some(&target), Some(&value)) = (node.children.first(), node.children.get(1)) else {
            continue;
        };
        // The update must land on an amount-derived scalar, not a ledger
        // mapping.
        let targets = condition_decls(ast, &[target]);
        if targets.intersection(&amount_deps).next().is_none() {
            continue;
        }
        let reads = condition_decls(ast, &[value]);
        for &source in &fee_sources {
            let source_flow = flowing_dependants(ast, summary, &BTreeSet::from([source]));
            if source_flow.intersection(&reads).next().is_none() {
                continue;
            }
            if let Some((mutator, via)) = management(ast, summary, source).guarded_evidence() {
                record(
                    Category::FeeManipulation,
                    ast.node(source).name.clone(),
                    Evidence {
                        end_node_id: assignment,
                        mutator,
                        via,
                    },
                );
            }
        }
    }

    // Invalid callback: a call-graph cycle whose member's input reaches a
    // managed-variable check in an end node.
    let edges: Vec<(u32, u32)> = summary.call_graph.iter().copied().collect();
    let managed_state: Vec<u32> = summary
        .s_a
        .iter()
        .chain(summary.s_i.iter())
        .copied()
        .filter(|&v| management(ast, summary, v).guarded_evidence().is_some())
        .collect();
    for cycle in find_cycles(&edges) {
        for &member in &cycle {
            let inputs: BTreeSet<u32> = params_of(ast, member).into_iter().collect();
            if inputs.is_empty() {
                continue;
            }
            let input_flow = flowing_dependants(ast, summary, &inputs);
            for &end in &summary.n {
                let asserted = asserted_decls(ast, end);
                if asserted.intersection(&input_flow).next().is_none() {
                    continue;
                }
                for &v in managed_state.iter().filter(|v| asserted.contains(v)) {
                    let (mutator, via) = management(ast, summary, v)
                        .guarded_evidence()
                        .expect("managed_state is pre-filtered");
                    record(
                        Category::InvalidCallback,
                        ast.node(member).name.clone(),
                        Evidence {
                            end_node_id: end,
                            mutator,
                            via,
                        },
                    );
                }
            }
        }
    }

    found.into_values().collect()
}
