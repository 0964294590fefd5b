//! Contract AST ingestion and validation.
//!
//! Source contracts arrive as a JSON document describing one or more
//! contracts, each a forest of typed nodes (state variables, functions,
//! statements, expressions).  This module validates the document shape and
//! produces an indexed [`ContractAst`] suitable for semantic summarisation:
//! constant-time node lookup, parent links, and per-contract membership.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Schema revision accepted by [`parse_ast`].
pub const SCHEMA_VERSION: u32 = 1;

/// Node role inside a contract tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Contract,
    StateVar,
    Function,
    Modifier,
    Parameter,
    Block,
    If,
    Call,
    LowLevelCall,
    Require,
    Assert,
    Revert,
    Return,
    Assignment,
    BinaryOp,
    Identifier,
    Literal,
    MemberAccess,
}

/// Coarse type classification attached to declarations.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum TypeTag {
    Address,
    AddressList,
    Bool,
    Int,
    Uint,
    String,
    Mapping,
    #[default]
    Other,
}

impl TypeTag {
    /// True for scalar integer declarations (the `s_i` bucket feed).
    pub fn is_integer(self) -> bool {
        matches!(self, TypeTag::Int | TypeTag::Uint)
    }

    /// True for address-typed declarations, scalar or list (the `s_a` feed).
    pub fn is_address_like(self) -> bool {
        matches!(self, TypeTag::Address | TypeTag::AddressList)
    }
}

/// Declaration visibility.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Public,
    External,
    Internal,
    #[default]
    Private,
}

impl Visibility {
    /// True when the declaration is callable from outside the contract.
    pub fn is_reachable_externally(self) -> bool {
        matches!(self, Visibility::Public | Visibility::External)
    }
}

/// One node of a contract tree after validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    /// Document-unique identifier.
    pub id: u32,
    pub kind: NodeKind,
    /// Declared or referenced name; empty for anonymous nodes such as blocks.
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub type_tag: TypeTag,
    /// True for compile-time constants.
    #[serde(default)]
    pub constant: bool,
    #[serde(default)]
    pub visibility: Visibility,
    /// Child node ids in source order.
    #[serde(default)]
    pub children: Vec<u32>,
    /// Referenced declaration id, if this node points at one (identifiers,
    /// calls, modifier attachments).  `None` means no reference; a reference
    /// to an id absent from the document is kept and flagged external.
    #[serde(default)]
    pub refs: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawContract {
    name: String,
    nodes: Vec<Node>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawDocument {
    schema_version: u32,
    contracts: Vec<RawContract>,
}

/// Validation failures raised by [`parse_ast`].
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum AstError {
    /// The document is not valid JSON for the expected shape.
    #[error("malformed document: {detail}")]
    Malformed { detail: String },
    /// The document declares a schema revision this parser does not accept.
    #[error("unsupported schema version {found}")]
    UnsupportedSchema { found: u32 },
    /// Two nodes share an id.
    #[error("duplicate node id {id}")]
    DuplicateId { id: u32 },
    /// A node kind string outside the accepted vocabulary.
    #[error("unknown node kind {kind:?} at node {id}")]
    UnknownKind { id: u32, kind: String },
    /// A child id that resolves to no node in the document.
    #[error("dangling child {child} under node {parent}")]
    DanglingChild { parent: u32, child: u32 },
    /// A node listed as a child of more than one parent.
    #[error("node {child} claimed by parents {first} and {second}")]
    SharedChild { child: u32, first: u32, second: u32 },
}

/// One contract of the validated document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contract {
    pub name: String,
    /// Ids of the contract's root nodes (direct members).
    pub roots: Vec<u32>,
    /// All node ids belonging to this contract, roots and descendants.
    pub members: Vec<u32>,
}

/// Validated, indexed form of a contract document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractAst {
    contracts: Vec<Contract>,
    nodes: BTreeMap<u32, Node>,
    /// Child id -> parent id.
    parents: BTreeMap<u32, u32>,
    /// Node id -> index into `contracts`.
    owners: BTreeMap<u32, usize>,
    /// Ids of nodes whose `refs` target is absent from the document.
    external_refs: Vec<u32>,
}

impl ContractAst {
    /// Node by id; ids come from the validated document so lookups on ids
    /// obtained from this AST never fail.
    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[&id]
    }

    /// Node by id, tolerating ids that may not exist.
    pub fn get(&self, id: u32) -> Option<&Node> {
        self.nodes.get(&id)
    }

    /// Parent of `id`, or `None` for contract roots.
    pub fn parent(&self, id: u32) -> Option<u32> {
        self.parents.get(&id).copied()
    }

    /// All contracts in document order.
    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    /// Index of the contract containing `id`.
    pub fn owner(&self, id: u32) -> usize {
        self.owners[&id]
    }

    /// All node ids in ascending order.
    pub fn node_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes.keys().copied()
    }

    /// True when `id` carries a reference to a declaration outside the
    /// document (an unresolved external target).
    pub fn is_external_ref(&self, id: u32) -> bool {
        self.external_refs.binary_search(&id).is_ok()
    }

    /// The resolved target of `id`'s reference, if any.
    pub fn resolved_ref(&self, id: u32) -> Option<u32> {
        let target = self.nodes[&id].refs?;
        self.nodes.contains_key(&target).then_some(target)
    }

    /// Walk `id` and all descendants in preorder.
    pub fn descendants(&self, id: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            out.push(cur);
            let node = &self.nodes[&cur];
            for &child in node.children.iter().rev() {
                stack.push(child);
            }
        }
        out
    }

    /// Enclosing function or modifier of `id`, if any.
    pub fn enclosing_callable(&self, id: u32) -> Option<u32> {
        let mut cur = self.parent(id)?;
        loop {
            match self.nodes[&cur].kind {
                NodeKind::Function | NodeKind::Modifier => return Some(cur),
                _ => cur = self.parent(cur)?,
            }
        }
    }
}

/// Parse and validate a contract document.
///
/// Checks performed:
/// - the JSON matches the node schema and declares a supported version;
/// - node kinds and type tags come from the fixed vocabulary (unknown kinds
///   are reported with the offending node id);
/// - ids are unique across the whole document;
/// - every child id resolves, and no node has two parents;
/// - `refs` targets that do not resolve are flagged external rather than
///   rejected, so partially available sources still parse.
pub fn parse_ast(document: &str) -> Result<ContractAst, AstError> {
    let value: serde_json::Value =
        serde_json::from_str(document).map_err(|e| AstError::Malformed {
            detail: e.to_string(),
        })?;

    // Surface unknown kinds with the node id before strict deserialization,
    // which would otherwise report only a JSON pointer.
    precheck_kinds(&value)?;

    let raw: RawDocument = serde_json::from_value(value).map_err(|e| AstError::Malformed {
        detail: e.to_string(),
    })?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(AstError::UnsupportedSchema {
            found: raw.schema_version,
        });
    }

    let mut nodes: BTreeMap<u32, Node> = BTreeMap::new();
    for contract in &raw.contracts {
        for node in &contract.nodes {
            if nodes.insert(node.id, node.clone()).is_some() {
                return Err(AstError::DuplicateId { id: node.id });
            }
        }
    }

    let mut parents: BTreeMap<u32, u32> = BTreeMap::new();
    for node in nodes.values() {
        for &child in &node.children {
            if !nodes.contains_key(&child) {
                return Err(AstError::DanglingChild {
                    parent: node.id,
                    child,
                });
            }
            if let Some(&first) = parents.get(&child) {
                return Err(AstError::SharedChild {
                    child,
                    first,
                    second: node.id,
                });
            }
            parents.insert(child, node.id);
        }
    }

    let mut contracts = Vec::new();
    let mut owners: BTreeMap<u32, usize> = BTreeMap::new();
    for (index, contract) in raw.contracts.iter().enumerate() {
        let roots: Vec<u32> = contract
            .nodes
            .iter()
            .map(|n| n.id)
            .filter(|id| !parents.contains_key(id))
            .collect();
        let members: Vec<u32> = contract.nodes.iter().map(|n| n.id).collect();
        for &id in &members {
            owners.insert(id, index);
        }
        contracts.push(Contract {
            name: contract.name.clone(),
            roots,
            members,
        });
    }

    let mut external_refs: Vec<u32> = nodes
        .values()
        .filter(|n| matches!(n.refs, Some(target) if !nodes.contains_key(&target)))
        .map(|n| n.id)
        .collect();
    external_refs.sort_unstable();

    Ok(ContractAst {
        contracts,
        nodes,
        parents,
        owners,
        external_refs,
    })
}

/// Scan the raw JSON for `kind` strings outside the vocabulary so the error
/// can name the offending node.
fn precheck_kinds(value: &serde_json::Value) -> Result<(), AstError> {
    const KNOWN: [&str; 18] = [
        "contract",
        "state_var",
        "function",
        "modifier",
        "parameter",
        "block",
        "if",
        "call",
        "low_level_call",
        "require",
        "assert",
        "revert",
        "return",
        "assignment",
        "binary_op",
        "identifier",
        "literal",
        "member_access",
    ];
    let contracts = value
        .get("contracts")
        .and_then(|c| c.as_array())
        .ok_or_else(|| AstError::Malformed {
            detail: "missing contracts array".into(),
        })?;
    for contract in contracts {
        let Some(nodes) = contract.get("nodes").and_then(|n| n.as_array()) else {
            continue;
        };
        for node in nodes {
            let kind = node.get("kind").and_then(|k| k.as_str()).unwrap_or("");
            if !KNOWN.contains(&kind) {
                let id = node.get("id").and_then(|i| i.as_u64()).unwrap_or(0) as u32;
                return Err(AstError::UnknownKind {
                    id,
                    kind: kind.to_string(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(nodes: &str) -> String {
        format!(r#"{{"schema_version":1,"contracts":[{{"name":"T","nodes":{nodes}}}]}}"#)
    }

    #[test]
    fn minimal_contract_parses() {
        let text = doc(r#"[
                {"id":1,"kind":"contract","name":"T","children":[2]},
                {"id":2,"kind":"state_var","name":"x","type_tag":"uint"}
            ]"#);
        let ast = parse_ast(&text).expect("parse");
        assert_eq!(ast.contracts().len(), 1);
        assert_eq!(ast.node(2).name, "x");
        assert_eq!(ast.parent(2), Some(1));
        assert_eq!(ast.parent(1), None);
        assert_eq!(ast.owner(2), 0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = doc(r#"[
                {"id":1,"kind":"contract","name":"T"},
                {"id":1,"kind":"state_var","name":"x"}
            ]"#);
        assert_eq!(parse_ast(&text), Err(AstError::DuplicateId { id: 1 }));
    }

    #[test]
    fn unknown_kind_reports_offending_id() {
        let text = doc(r#"[{"id":7,"kind":"teleport","name":"z"}]"#);
        assert_eq!(
            parse_ast(&text),
            Err(AstError::UnknownKind {
                id: 7,
                kind: "teleport".into()
            })
        );
    }

    #[test]
    fn dangling_child_rejected() {
        let text = doc(r#"[{"id":1,"kind":"contract","name":"T","children":[99]}]"#);
        assert_eq!(
            parse_ast(&text),
            Err(AstError::DanglingChild {
                parent: 1,
                child: 99
            })
        );
    }

    #[test]
    fn shared_child_rejected() {
        let text = doc(r#"[
                {"id":1,"kind":"contract","name":"T","children":[3]},
                {"id":2,"kind":"contract","name":"U","children":[3]},
                {"id":3,"kind":"state_var","name":"x"}
            ]"#);
        assert!(matches!(
            parse_ast(&text),
            Err(AstError::SharedChild { child: 3, .. })
        ));
    }

    #[test]
    fn unresolved_refs_flagged_external_not_rejected() {
        let text = doc(r#"[
                {"id":1,"kind":"contract","name":"T","children":[2]},
                {"id":2,"kind":"identifier","name":"oracle","refs":500}
            ]"#);
        let ast = parse_ast(&text).expect("parse");
        assert!(ast.is_external_ref(2));
        assert_eq!(ast.resolved_ref(2), None);
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(matches!(
            parse_ast("{not json"),
            Err(AstError::Malformed { .. })
        ));
        assert!(matches!(
            parse_ast(r#"{"schema_version":1}"#),
            Err(AstError::Malformed { .. })
        ));
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let text = r#"{"schema_version":2,"contracts":[]}"#;
        assert_eq!(
            parse_ast(text),
            Err(AstError::UnsupportedSchema { found: 2 })
        );
    }

    #[test]
    fn descendants_preorder() {
        let text = doc(r#"[
                {"id":1,"kind":"contract","name":"T","children":[2,5]},
                {"id":2,"kind":"function","name":"f","children":[3]},
                {"id":3,"kind":"block","children":[4]},
                {"id":4,"kind":"return"},
                {"id":5,"kind":"state_var","name":"x"}
            ]"#);
        let ast = parse_ast(&text).expect("parse");
        assert_eq!(ast.descendants(1), vec![1, 2, 3, 4, 5]);
        assert_eq!(ast.enclosing_callable(4), Some(2));
        assert_eq!(ast.enclosing_callable(5), None);
    }
}
