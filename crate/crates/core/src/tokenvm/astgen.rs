//! Contract-AST fixture generation.
//!
//! Every token spec maps to a compact AST document (the same JSON schema the
//! static analyzer ingests) that encodes the trap the way a scammer would have
//! written it: the check inline in `_transfer`, behind a guard modifier, at
//! the bottom of a helper chain, or inside a separate helper contract reached
//! through a low-level call. Identifier names come straight from the spec, so
//! runtime failure traces and static indicators agree on strings.

use super::{
    Concealment, ListKind, Placement, TokenSpec, EXTERNAL_CHECK_FUNCTION, EXTERNAL_CONTRACT_NAME,
    MODIFIER_NAME, NESTED_HELPER_PREFIX,
};
use serde_json::{json, Value};

/// Current AST schema version.
pub const SCHEMA_VERSION: u32 = 1;

struct ContractBuf {
    name: String,
    nodes: Vec<Value>,
    decls: Vec<u32>,
}

struct Emit {
    next_id: u32,
    contracts: Vec<ContractBuf>,
}

impl Emit {
    fn new() -> Self {
        Emit {
            next_id: 1,
            contracts: Vec::new(),
        }
    }

    fn begin(&mut self, name: &str) -> usize {
        self.contracts.push(ContractBuf {
            name: name.to_string(),
            nodes: Vec::new(),
            decls: Vec::new(),
        });
        self.contracts.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    fn node(
        &mut self,
        c: usize,
        kind: &str,
        name: &str,
        type_tag: &str,
        constant: bool,
        visibility: &str,
        children: Vec<u32>,
        refs: Option<u32>,
    ) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        self.contracts[c].nodes.push(json!({
            "id": id,
            "kind": kind,
            "name": name,
            "type_tag": type_tag,
            "constant": constant,
            "visibility": visibility,
            "children": children,
            "refs": refs,
        }));
        id
    }

    fn state_var(&mut self, c: usize, name: &str, tag: &str, constant: bool) -> u32 {
        let id = self.node(c, "state_var", name, tag, constant, "private", vec![], None);
        self.contracts[c].decls.push(id);
        id
    }

    fn local(&mut self, c: usize, name: &str, tag: &str) -> u32 {
        // Function locals reuse the state_var kind but live inside a block,
        // not under the contract node.
        self.node(c, "state_var", name, tag, false, "internal", vec![], None)
    }

    fn param(&mut self, c: usize, name: &str, tag: &str) -> u32 {
        self.node(c, "parameter", name, tag, false, "internal", vec![], None)
    }

    fn ident(&mut self, c: usize, name: &str, refs: Option<u32>) -> u32 {
        self.node(
            c,
            "identifier",
            name,
            "other",
            false,
            "internal",
            vec![],
            refs,
        )
    }

    fn lit(&mut self, c: usize, text: &str) -> u32 {
        self.node(c, "literal", text, "other", true, "internal", vec![], None)
    }

    fn bin(&mut self, c: usize, op: &str, lhs: u32, rhs: u32) -> u32 {
        self.node(
            c,
            "binary_op",
            op,
            "other",
            false,
            "internal",
            vec![lhs, rhs],
            None,
        )
    }

    fn not(&mut self, c: usize, expr: u32) -> u32 {
        self.node(
            c,
            "binary_op",
            "!",
            "other",
            false,
            "internal",
            vec![expr],
            None,
        )
    }

    /// `container[key]` or `container.key`.
    fn member(&mut self, c: usize, container_decl: u32, container_name: &str, key: u32) -> u32 {
        let container = self.ident(c, container_name, Some(container_decl));
        self.node(
            c,
            "member_access",
            "[]",
            "other",
            false,
            "internal",
            vec![container, key],
            None,
        )
    }

    fn require(&mut self, c: usize, cond: u32, message: &str) -> u32 {
        let msg = self.lit(c, message);
        self.node(
            c,
            "require",
            "require",
            "other",
            false,
            "internal",
            vec![cond, msg],
            None,
        )
    }

    fn assign(&mut self, c: usize, target: u32, value: u32) -> u32 {
        self.node(
            c,
            "assignment",
            "=",
            "other",
            false,
            "internal",
            vec![target, value],
            None,
        )
    }

    fn iff(&mut self, c: usize, cond: u32, then_block: u32) -> u32 {
        self.node(
            c,
            "if",
            "if",
            "other",
            false,
            "internal",
            vec![cond, then_block],
            None,
        )
    }

    fn block(&mut self, c: usize, stmts: Vec<u32>) -> u32 {
        self.node(c, "block", "", "other", false, "internal", stmts, None)
    }

    fn call(&mut self, c: usize, callee: &str, refs: Option<u32>, args: Vec<u32>) -> u32 {
        self.node(c, "call", callee, "other", false, "internal", args, refs)
    }

    fn low_call(&mut self, c: usize, target: &str, refs: Option<u32>, args: Vec<u32>) -> u32 {
        self.node(
            c,
            "low_level_call",
            target,
            "other",
            false,
            "internal",
            args,
            refs,
        )
    }

    fn ret(&mut self, c: usize, expr: Option<u32>) -> u32 {
        let children = expr.map(|e| vec![e]).unwrap_or_default();
        self.node(
            c, "return", "return", "other", false, "internal", children, None,
        )
    }

    fn function(
        &mut self,
        c: usize,
        name: &str,
        visibility: &str,
        params: Vec<u32>,
        attachments: Vec<u32>,
        body: u32,
    ) -> u32 {
        let mut children = params;
        children.extend(attachments);
        children.push(body);
        let id = self.node(
            c, "function", name, "other", false, visibility, children, None,
        );
        self.contracts[c].decls.push(id);
        id
    }

    fn modifier(&mut self, c: usize, name: &str, params: Vec<u32>, body: u32) -> u32 {
        let mut children = params;
        children.push(body);
        let id = self.node(
            c, "modifier", name, "other", false, "internal", children, None,
        );
        self.contracts[c].decls.push(id);
        id
    }

    /// Modifier attachment on a function: an identifier child referencing the
    /// modifier, whose own children are the argument expressions.
    fn attach(&mut self, c: usize, modifier_id: u32, name: &str, args: Vec<u32>) -> u32 {
        self.node(
            c,
            "identifier",
            name,
            "other",
            false,
            "internal",
            args,
            Some(modifier_id),
        )
    }

    fn finish(mut self) -> Value {
        let mut contracts = Vec::new();
        for i in 0..self.contracts.len() {
            let name = self.contracts[i].name.clone();
            let decls = self.contracts[i].decls.clone();
            let id = self.next_id;
            self.next_id += 1;
            self.contracts[i].nodes.push(json!({
                "id": id,
                "kind": "contract",
                "name": name,
                "type_tag": "other",
                "constant": false,
                "visibility": "public",
                "children": decls,
                "refs": null,
            }));
            contracts.push(json!({
                "name": self.contracts[i].name,
                "nodes": self.contracts[i].nodes,
            }));
        }
        json!({ "schema_version": SCHEMA_VERSION, "contracts": contracts })
    }
}

/// Declarations of the main contract that guard builders need to reference.
struct Vars {
    owner: u32,
    pair: u32,
    hidden: Option<u32>,
}

/// Where a trap's check code and state ended up.
struct GuardSite {
    /// Statements to inject at the `_transfer` call site (main contract).
    entry_stmts: Vec<u32>,
    /// Declaration id of the trap variable (wherever it lives).
    var_decl: Option<u32>,
    /// Modifier attachment to add to `_transfer`, if placement used one.
    attachment: Option<u32>,
}

pub fn contract_ast(spec: &TokenSpec) -> Value {
    let mut e = Emit::new();
    let main = e.begin(&contract_name(spec));
    let helper = matches!(spec.placement, Placement::ViaExternalContract)
        .then(|| e.begin(EXTERNAL_CONTRACT_NAME));

    let blank = spec.conceals(Concealment::BlankError);
    let msg = |text: &'static str| if blank { "" } else { text };

    // --- main contract state ---------------------------------------------
    let balances = e.state_var(main, "_balances", "mapping", false);
    let total = e.state_var(main, "_totalSupply", "uint", true);
    let owner = e.state_var(main, "_owner", "address", false);
    let pair = e.state_var(main, "uniswapV2Pair", "address", false);
    let hidden = spec
        .conceals(Concealment::IncompleteRenouncement)
        .then(|| e.state_var(main, "_devWallet", "address", false));
    let vars = Vars {
        owner,
        pair,
        hidden,
    };

    // Helper contract gets its own owner for setter guards.
    let helper_owner = helper.map(|h| e.state_var(h, "_owner", "address", false));

    let mut ctor_stmts: Vec<u32> = Vec::new();
    {
        let ms = e.ident(main, "msg.sender", None);
        let ow = e.ident(main, "_owner", Some(owner));
        ctor_stmts.push(e.assign(main, ow, ms));
        let pr = e.ident(main, "uniswapV2Pair", Some(pair));
        let pl = e.lit(main, "0xPAIR");
        ctor_stmts.push(e.assign(main, pr, pl));
        let ow2 = e.ident(main, "_owner", Some(owner));
        let cell = e.member(main, balances, "_balances", ow2);
        let sup = e.ident(main, "_totalSupply", Some(total));
        ctor_stmts.push(e.assign(main, cell, sup));
        if let Some(h) = vars.hidden {
            let hid = e.ident(main, "_devWallet", Some(h));
            let lit = e.lit(main, "0xSHADOW");
            ctor_stmts.push(e.assign(main, hid, lit));
        }
    }

    // --- trap state + guard code -----------------------------------------
    // `_transfer` parameters are created up front so guard code in modifiers
    // and helper chains can be wired to fresh parameters of their own while
    // the inline case references these directly.
    let t_from = e.param(main, "from", "address");
    let t_to = e.param(main, "to", "address");
    let t_amount = e.param(main, "amount", "uint");

    let mut body: Vec<u32> = Vec::new();
    let mut attachments: Vec<u32> = Vec::new();
    let mut send_expr: Option<u32> = None;
    // Trap-state initializers, split by which contract's constructor gets them.
    let mut ctor_helper: Vec<u32> = Vec::new();

    let is_callback_token = spec.traps.callback.is_some();
    let external = matches!(spec.placement, Placement::ViaExternalContract);

    // Permission trap (sell-side check), unless it belongs to a callback
    // token, where the list check lives in the reentry function instead.
    if let Some(p) = spec
        .traps
        .permission
        .as_ref()
        .filter(|_| !is_callback_token)
    {
        let site = build_guarded(
            &mut e,
            main,
            helper,
            spec,
            &vars,
            (t_from, t_to, t_amount),
            GuardKind::Permission {
                whitelist: matches!(p.list_kind, ListKind::Whitelist),
            },
            &p.identifier,
            msg(match p.list_kind {
                ListKind::Whitelist => "sender is not enabled",
                ListKind::Blacklist => "sender is blocked",
            }),
        );
        // Sell scope stays in `_transfer`: if (to == pair) { ...check... }
        if !site.entry_stmts.is_empty() {
            let to_i = e.ident(main, "to", Some(t_to));
            let pr = e.ident(main, "uniswapV2Pair", Some(vars.pair));
            let cond = e.bin(main, "==", to_i, pr);
            let blk = e.block(main, site.entry_stmts.clone());
            body.push(e.iff(main, cond, blk));
        }
        // Seed the list in the constructor of whichever contract holds it.
        if let Some(var) = site.var_decl {
            let (c, init) = if external {
                (helper.unwrap(), &mut ctor_helper)
            } else {
                (main, &mut ctor_stmts)
            };
            let key = match p.list_kind {
                ListKind::Whitelist => {
                    let own = if external {
                        helper_owner.unwrap()
                    } else {
                        vars.owner
                    };
                    e.ident(c, "_owner", Some(own))
                }
                ListKind::Blacklist => e.lit(c, "0xBLOCKED"),
            };
            let cell = e.member(c, var, &p.identifier, key);
            let tru = e.lit(c, "true");
            init.push(e.assign(c, cell, tru));
        }
        emit_trap_admin(
            &mut e,
            main,
            helper,
            helper_owner,
            &vars,
            spec,
            &site,
            "setMembers",
            p.has_setter,
        );
        if let Some(att) = site_attachment(&site) {
            attachments.push(att);
        }
    }

    if let Some(s) = spec.traps.suspension.as_ref() {
        let site = build_guarded(
            &mut e,
            main,
            helper,
            spec,
            &vars,
            (t_from, t_to, t_amount),
            GuardKind::Switch,
            &s.identifier,
            msg("trading is suspended"),
        );
        if s.suspend_buys || site.entry_stmts.is_empty() {
            body.extend(site.entry_stmts.clone());
        } else {
            // Buys stay open: if (from != pair) { ...check... }
            let from_i = e.ident(main, "from", Some(t_from));
            let pr = e.ident(main, "uniswapV2Pair", Some(vars.pair));
            let cond = e.bin(main, "!=", from_i, pr);
            let blk = e.block(main, site.entry_stmts.clone());
            body.push(e.iff(main, cond, blk));
        }
        if let Some(var) = site.var_decl {
            let (c, init) = if external {
                (helper.unwrap(), &mut ctor_helper)
            } else {
                (main, &mut ctor_stmts)
            };
            let sw = e.ident(c, &s.identifier, Some(var));
            let v = e.lit(c, if s.switch_value { "true" } else { "false" });
            init.push(e.assign(c, sw, v));
        }
        emit_trap_admin(
            &mut e,
            main,
            helper,
            helper_owner,
            &vars,
            spec,
            &site,
            "setTrading",
            s.has_setter,
        );
        if let Some(att) = site_attachment(&site) {
            attachments.push(att);
        }
    }

    if let Some(l) = spec.traps.amount_limit.as_ref() {
        let site = build_guarded(
            &mut e,
            main,
            helper,
            spec,
            &vars,
            (t_from, t_to, t_amount),
            GuardKind::Limit,
            &l.identifier,
            msg("amount exceeds the transfer limit"),
        );
        if l.sell_only && !site.entry_stmts.is_empty() {
            let to_i = e.ident(main, "to", Some(t_to));
            let pr = e.ident(main, "uniswapV2Pair", Some(vars.pair));
            let cond = e.bin(main, "==", to_i, pr);
            let blk = e.block(main, site.entry_stmts.clone());
            body.push(e.iff(main, cond, blk));
        } else {
            body.extend(site.entry_stmts.clone());
        }
        if let Some(var) = site.var_decl {
            let (c, init) = if external {
                (helper.unwrap(), &mut ctor_helper)
            } else {
                (main, &mut ctor_stmts)
            };
            let tv = e.ident(c, &l.identifier, Some(var));
            let v = e.lit(c, &l.limit.to_string());
            init.push(e.assign(c, tv, v));
        }
        emit_trap_admin(
            &mut e,
            main,
            helper,
            helper_owner,
            &vars,
            spec,
            &site,
            "setMaxAmount",
            l.has_setter,
        );
        if let Some(att) = site_attachment(&site) {
            attachments.push(att);
        }
    }

    if let Some(f) = spec.traps.fee.as_ref() {
        let (site, send) = build_fee(
            &mut e,
            main,
            helper,
            spec,
            &vars,
            (t_from, t_to, t_amount),
            &f.identifier,
        );
        body.extend(site.entry_stmts.clone());
        send_expr = Some(send);
        if let Some(var) = site.var_decl {
            let (c, init) = if external {
                (helper.unwrap(), &mut ctor_helper)
            } else {
                (main, &mut ctor_stmts)
            };
            let tv = e.ident(c, &f.identifier, Some(var));
            let v = e.lit(c, &f.sell_fee_bps.to_string());
            init.push(e.assign(c, tv, v));
        }
        emit_trap_admin(
            &mut e,
            main,
            helper,
            helper_owner,
            &vars,
            spec,
            &site,
            "setFees",
            f.has_setter,
        );
        if let Some(att) = site_attachment(&site) {
            attachments.push(att);
        }
    }

    // Callback trap: `_transfer` fires the reentry function on sells; the
    // reentry function holds the list check (per placement) and calls back.
    let mut reentry_fn: Option<(String, u32)> = None;
    if let (Some(cb), Some(p)) = (spec.traps.callback.as_ref(), spec.traps.permission.as_ref()) {
        if is_callback_token {
            let (fn_id, setter_site) = build_reentry(
                &mut e,
                main,
                helper,
                helper_owner,
                spec,
                &vars,
                &cb.reentry_function,
                &p.identifier,
                msg("sender is blocked"),
                p.has_setter,
                &mut ctor_stmts,
                &mut ctor_helper,
            );
            reentry_fn = Some((cb.reentry_function.clone(), fn_id));
            let _ = setter_site;
            let to_i = e.ident(main, "to", Some(t_to));
            let pr = e.ident(main, "uniswapV2Pair", Some(vars.pair));
            let cond = e.bin(main, "==", to_i, pr);
            let self_lit = e.lit(main, "address(this)");
            let amt = e.ident(main, "amount", Some(t_amount));
            let callx = e.call(main, &cb.reentry_function, Some(fn_id), vec![self_lit, amt]);
            let blk = e.block(main, vec![callx]);
            body.push(e.iff(main, cond, blk));
        }
    }

    // Balance bookkeeping, shared by every fixture.
    {
        let from_i = e.ident(main, "from", Some(t_from));
        let cell = e.member(main, balances, "_balances", from_i);
        let amt = e.ident(main, "amount", Some(t_amount));
        let cond = e.bin(main, ">=", cell, amt);
        body.push(e.require(main, cond, msg("transfer amount exceeds balance")));

        let from_i = e.ident(main, "from", Some(t_from));
        let target = e.member(main, balances, "_balances", from_i);
        let from_i2 = e.ident(main, "from", Some(t_from));
        let cur = e.member(main, balances, "_balances", from_i2);
        let amt = e.ident(main, "amount", Some(t_amount));
        let sub = e.bin(main, "-", cur, amt);
        body.push(e.assign(main, target, sub));

        let to_i = e.ident(main, "to", Some(t_to));
        let target = e.member(main, balances, "_balances", to_i);
        let to_i2 = e.ident(main, "to", Some(t_to));
        let cur = e.member(main, balances, "_balances", to_i2);
        let credited = match send_expr {
            Some(local) => e.ident(main, "sendAmount", Some(local)),
            None => e.ident(main, "amount", Some(t_amount)),
        };
        let add = e.bin(main, "+", cur, credited);
        body.push(e.assign(main, target, add));
    }

    let t_body = e.block(main, body);
    let transfer_internal = e.function(
        main,
        "_transfer",
        "internal",
        vec![t_from, t_to, t_amount],
        attachments,
        t_body,
    );

    // Wire the reentry function's recursive call now that `_transfer` exists.
    if let Some((_, fn_id)) = reentry_fn {
        patch_reentry_call(&mut e, main, fn_id, transfer_internal);
    }

    // Public entry points.
    {
        let p_to = e.param(main, "recipient", "address");
        let p_amt = e.param(main, "amount", "uint");
        let ms = e.ident(main, "msg.sender", None);
        let a1 = e.ident(main, "recipient", Some(p_to));
        let a2 = e.ident(main, "amount", Some(p_amt));
        let callx = e.call(main, "_transfer", Some(transfer_internal), vec![ms, a1, a2]);
        let tru = e.lit(main, "true");
        let r = e.ret(main, Some(tru));
        let b = e.block(main, vec![callx, r]);
        e.function(main, "transfer", "public", vec![p_to, p_amt], vec![], b);
    }
    {
        let p_from = e.param(main, "sender", "address");
        let p_to = e.param(main, "recipient", "address");
        let p_amt = e.param(main, "amount", "uint");
        let a0 = e.ident(main, "sender", Some(p_from));
        let a1 = e.ident(main, "recipient", Some(p_to));
        let a2 = e.ident(main, "amount", Some(p_amt));
        let callx = e.call(main, "_transfer", Some(transfer_internal), vec![a0, a1, a2]);
        let tru = e.lit(main, "true");
        let r = e.ret(main, Some(tru));
        let b = e.block(main, vec![callx, r]);
        e.function(
            main,
            "transferFrom",
            "public",
            vec![p_from, p_to, p_amt],
            vec![],
            b,
        );
    }

    // renounceOwnership: public owner goes away; the hidden co-owner, if any,
    // is deliberately left out of this function.
    {
        let guard = owner_guard(&mut e, main, vars.owner, None);
        let ow = e.ident(main, "_owner", Some(vars.owner));
        let zero = e.lit(main, "address(0)");
        let asg = e.assign(main, ow, zero);
        let b = e.block(main, vec![guard, asg]);
        e.function(main, "renounceOwnership", "public", vec![], vec![], b);
    }

    // Constructors carry the base wiring plus every trap initializer.
    {
        let b = e.block(main, ctor_stmts);
        e.function(main, "constructor", "public", vec![], vec![], b);
    }
    if let Some(h) = helper {
        let ms = e.ident(h, "msg.sender", None);
        let ow = e.ident(
            h,
            "_owner",
            Some(helper_owner.expect("helper owner exists")),
        );
        let mut stmts = vec![e.assign(h, ow, ms)];
        stmts.append(&mut ctor_helper);
        let b = e.block(h, stmts);
        e.function(h, "constructor", "public", vec![], vec![], b);
    }

    e.finish()
}

fn contract_name(spec: &TokenSpec) -> String {
    let cleaned: String = spec
        .name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect();
    if cleaned.is_empty() {
        format!(
            "Token{}",
            spec.symbol
                .chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .collect::<String>()
        )
    } else {
        cleaned
    }
}

enum GuardKind {
    Permission { whitelist: bool },
    Switch,
    Limit,
}

/// `require(msg.sender == _owner [|| msg.sender == _devWallet])`.
fn owner_guard(e: &mut Emit, c: usize, owner: u32, hidden: Option<u32>) -> u32 {
    let ms = e.ident(c, "msg.sender", None);
    let ow = e.ident(c, "_owner", Some(owner));
    let mut cond = e.bin(c, "==", ms, ow);
    if let Some(h) = hidden {
        let ms2 = e.ident(c, "msg.sender", None);
        let hid = e.ident(c, "_devWallet", Some(h));
        let alt = e.bin(c, "==", ms2, hid);
        cond = e.bin(c, "||", cond, alt);
    }
    e.require(c, cond, "caller is not the owner")
}

/// The bare check statement for a trap, expressed against the given sender /
/// receiver / amount declarations and the trap variable.
fn check_stmt(
    e: &mut Emit,
    c: usize,
    kind: &GuardKind,
    var_decl: u32,
    var_name: &str,
    env: (u32, u32, u32),
    message: &str,
) -> u32 {
    let (from, _to, amount) = env;
    match kind {
        GuardKind::Permission { whitelist } => {
            let key = e.ident(c, "from", Some(from));
            let cell = e.member(c, var_decl, var_name, key);
            let cond = if *whitelist { cell } else { e.not(c, cell) };
            e.require(c, cond, message)
        }
        GuardKind::Switch => {
            let sw = e.ident(c, var_name, Some(var_decl));
            let cond = e.not(c, sw);
            e.require(c, cond, message)
        }
        GuardKind::Limit => {
            let amt = e.ident(c, "amount", Some(amount));
            let cap = e.ident(c, var_name, Some(var_decl));
            let cond = e.bin(c, "<=", amt, cap);
            e.require(c, cond, message)
        }
    }
}

/// Materialize a guard at the spec's placement. Returns the statements to
/// splice into `_transfer` plus where the trap variable ended up.
#[allow(clippy::too_many_arguments)]
fn build_guarded(
    e: &mut Emit,
    main: usize,
    helper: Option<usize>,
    spec: &TokenSpec,
    _vars: &Vars,
    env: (u32, u32, u32),
    kind: GuardKind,
    identifier: &str,
    message: &str,
) -> GuardSite {
    let tag = match kind {
        GuardKind::Permission { .. } => "address_list",
        GuardKind::Switch => "bool",
        GuardKind::Limit => "uint",
    };
    match spec.placement {
        Placement::Inline => {
            let var = e.state_var(main, identifier, tag, false);
            let stmt = check_stmt(e, main, &kind, var, identifier, env, message);
            GuardSite {
                entry_stmts: vec![stmt],
                var_decl: Some(var),
                attachment: None,
            }
        }
        Placement::ViaModifier => {
            let var = e.state_var(main, identifier, tag, false);
            let m_from = e.param(main, "from", "address");
            let m_to = e.param(main, "to", "address");
            let m_amt = e.param(main, "amount", "uint");
            let stmt = check_stmt(
                e,
                main,
                &kind,
                var,
                identifier,
                (m_from, m_to, m_amt),
                message,
            );
            let b = e.block(main, vec![stmt]);
            let m = e.modifier(main, MODIFIER_NAME, vec![m_from, m_to, m_amt], b);
            let (from, to, amount) = env;
            let a0 = e.ident(main, "from", Some(from));
            let a1 = e.ident(main, "to", Some(to));
            let a2 = e.ident(main, "amount", Some(amount));
            let att = e.attach(main, m, MODIFIER_NAME, vec![a0, a1, a2]);
            GuardSite {
                entry_stmts: vec![],
                var_decl: Some(var),
                attachment: Some(att),
            }
        }
        Placement::ViaNestedFunction => {
            let var = e.state_var(main, identifier, tag, false);
            let depth = spec.nesting_depth.max(1);
            // Build from the innermost helper outward.
            let mut inner: Option<u32> = None;
            for level in (1..=depth).rev() {
                let p_from = e.param(main, "from", "address");
                let p_to = e.param(main, "to", "address");
                let p_amt = e.param(main, "amount", "uint");
                let stmt = match inner {
                    None => check_stmt(
                        e,
                        main,
                        &kind,
                        var,
                        identifier,
                        (p_from, p_to, p_amt),
                        message,
                    ),
                    Some(next_fn) => {
                        let a0 = e.ident(main, "from", Some(p_from));
                        let a1 = e.ident(main, "to", Some(p_to));
                        let a2 = e.ident(main, "amount", Some(p_amt));
                        e.call(
                            main,
                            &format!("{NESTED_HELPER_PREFIX}{}", level + 1),
                            Some(next_fn),
                            vec![a0, a1, a2],
                        )
                    }
                };
                let b = e.block(main, vec![stmt]);
                let f = e.function(
                    main,
                    &format!("{NESTED_HELPER_PREFIX}{level}"),
                    "internal",
                    vec![p_from, p_to, p_amt],
                    vec![],
                    b,
                );
                inner = Some(f);
            }
            let (from, to, amount) = env;
            let a0 = e.ident(main, "from", Some(from));
            let a1 = e.ident(main, "to", Some(to));
            let a2 = e.ident(main, "amount", Some(amount));
            let entry = e.call(
                main,
                &format!("{NESTED_HELPER_PREFIX}1"),
                inner,
                vec![a0, a1, a2],
            );
            GuardSite {
                entry_stmts: vec![entry],
                var_decl: Some(var),
                attachment: None,
            }
        }
        Placement::ViaExternalContract => {
            let h = helper.expect("helper contract exists for external placement");
            let var = e.state_var(h, identifier, tag, false);
            let p_from = e.param(h, "from", "address");
            let p_to = e.param(h, "to", "address");
            let p_amt = e.param(h, "amount", "uint");
            let stmt = check_stmt(e, h, &kind, var, identifier, (p_from, p_to, p_amt), message);
            let b = e.block(h, vec![stmt]);
            let f = e.function(
                h,
                EXTERNAL_CHECK_FUNCTION,
                "external",
                vec![p_from, p_to, p_amt],
                vec![],
                b,
            );
            let (from, to, amount) = env;
            let a0 = e.ident(main, "from", Some(from));
            let a1 = e.ident(main, "to", Some(to));
            let a2 = e.ident(main, "amount", Some(amount));
            let entry = e.low_call(
                main,
                &format!("{EXTERNAL_CONTRACT_NAME}.{EXTERNAL_CHECK_FUNCTION}"),
                Some(f),
                vec![a0, a1, a2],
            );
            GuardSite {
                entry_stmts: vec![entry],
                var_decl: Some(var),
                attachment: None,
            }
        }
    }
}

/// Fee trap: compute `sendAmount = amount - amount * feeVar / 10000` at the
/// configured placement and return the local holding the credited amount.
fn build_fee(
    e: &mut Emit,
    main: usize,
    helper: Option<usize>,
    spec: &TokenSpec,
    _vars: &Vars,
    env: (u32, u32, u32),
    identifier: &str,
) -> (GuardSite, u32) {
    let (_, _, amount) = env;
    let send_local = e.local(main, "sendAmount", "uint");

    // fee = amount * feeVar / 10000; returns (stmts, fee_local_decl)
    let fee_math = |e: &mut Emit, c: usize, var: u32, amt_decl: u32| -> (Vec<u32>, u32) {
        let fee_local = e.local(c, "feeAmount", "uint");
        let a = e.ident(c, "amount", Some(amt_decl));
        let fv = e.ident(c, identifier, Some(var));
        let mul = e.bin(c, "*", a, fv);
        let tenk = e.lit(c, "10000");
        let div = e.bin(c, "/", mul, tenk);
        let fee_t = e.ident(c, "feeAmount", Some(fee_local));
        let a1 = e.assign(c, fee_t, div);
        (vec![fee_local, a1], fee_local)
    };
    // remainder = amount - feeAmount
    let minus_fee = |e: &mut Emit, c: usize, amt_decl: u32, fee_local: u32| -> u32 {
        let a = e.ident(c, "amount", Some(amt_decl));
        let f = e.ident(c, "feeAmount", Some(fee_local));
        e.bin(c, "-", a, f)
    };

    match spec.placement {
        Placement::Inline => {
            let var = e.state_var(main, identifier, "uint", false);
            let (mut stmts, fee_local) = fee_math(e, main, var, amount);
            let sub = minus_fee(e, main, amount, fee_local);
            let send_t = e.ident(main, "sendAmount", Some(send_local));
            let asg = e.assign(main, send_t, sub);
            let mut entry = vec![send_local];
            entry.append(&mut stmts);
            entry.push(asg);
            (
                GuardSite {
                    entry_stmts: entry,
                    var_decl: Some(var),
                    attachment: None,
                },
                send_local,
            )
        }
        Placement::ViaModifier => {
            // The modifier stashes the computed fee in a state variable the
            // body then subtracts.
            let var = e.state_var(main, identifier, "uint", false);
            let pending = e.state_var(main, "_pendingFee", "uint", false);
            let m_amt = e.param(main, "amount", "uint");
            let (mut stmts, fee_local) = fee_math(e, main, var, m_amt);
            let a = e.ident(main, "feeAmount", Some(fee_local));
            let p = e.ident(main, "_pendingFee", Some(pending));
            let asg = e.assign(main, p, a);
            stmts.push(asg);
            let b = e.block(main, stmts);
            let m = e.modifier(main, MODIFIER_NAME, vec![m_amt], b);
            let amt_i = e.ident(main, "amount", Some(amount));
            let att = e.attach(main, m, MODIFIER_NAME, vec![amt_i]);
            let amt_i2 = e.ident(main, "amount", Some(amount));
            let pf = e.ident(main, "_pendingFee", Some(pending));
            let sub2 = e.bin(main, "-", amt_i2, pf);
            let send_t = e.ident(main, "sendAmount", Some(send_local));
            let asg2 = e.assign(main, send_t, sub2);
            (
                GuardSite {
                    entry_stmts: vec![send_local, asg2],
                    var_decl: Some(var),
                    attachment: Some(att),
                },
                send_local,
            )
        }
        Placement::ViaNestedFunction => {
            let var = e.state_var(main, identifier, "uint", false);
            let depth = spec.nesting_depth.max(1);
            let mut inner: Option<u32> = None;
            for level in (1..=depth).rev() {
                let p_amt = e.param(main, "amount", "uint");
                let stmts = match inner {
                    None => {
                        let (mut stmts, fee_local) = fee_math(e, main, var, p_amt);
                        let sub = minus_fee(e, main, p_amt, fee_local);
                        let r = e.ret(main, Some(sub));
                        stmts.push(r);
                        stmts
                    }
                    Some(next_fn) => {
                        let a = e.ident(main, "amount", Some(p_amt));
                        let call = e.call(
                            main,
                            &format!("{NESTED_HELPER_PREFIX}{}", level + 1),
                            Some(next_fn),
                            vec![a],
                        );
                        let r = e.ret(main, Some(call));
                        vec![r]
                    }
                };
                let b = e.block(main, stmts);
                let f = e.function(
                    main,
                    &format!("{NESTED_HELPER_PREFIX}{level}"),
                    "internal",
                    vec![p_amt],
                    vec![],
                    b,
                );
                inner = Some(f);
            }
            let a = e.ident(main, "amount", Some(amount));
            let call = e.call(main, &format!("{NESTED_HELPER_PREFIX}1"), inner, vec![a]);
            let send_t = e.ident(main, "sendAmount", Some(send_local));
            let asg = e.assign(main, send_t, call);
            (
                GuardSite {
                    entry_stmts: vec![send_local, asg],
                    var_decl: Some(var),
                    attachment: None,
                },
                send_local,
            )
        }
        Placement::ViaExternalContract => {
            let h = helper.expect("helper contract exists for external placement");
            let var = e.state_var(h, identifier, "uint", false);
            let p_amt = e.param(h, "amount", "uint");
            let (mut stmts, fee_local) = fee_math(e, h, var, p_amt);
            let sub = minus_fee(e, h, p_amt, fee_local);
            let r = e.ret(h, Some(sub));
            stmts.push(r);
            let b = e.block(h, stmts);
            let f = e.function(
                h,
                EXTERNAL_CHECK_FUNCTION,
                "external",
                vec![p_amt],
                vec![],
                b,
            );
            let a = e.ident(main, "amount", Some(amount));
            let lc = e.low_call(
                main,
                &format!("{EXTERNAL_CONTRACT_NAME}.{EXTERNAL_CHECK_FUNCTION}"),
                Some(f),
                vec![a],
            );
            let send_t = e.ident(main, "sendAmount", Some(send_local));
            let asg = e.assign(main, send_t, lc);
            (
                GuardSite {
                    entry_stmts: vec![send_local, asg],
                    var_decl: Some(var),
                    attachment: None,
                },
                send_local,
            )
        }
    }
}

/// Reentry function for callback tokens: holds the blacklist check (placed
/// per the spec) and calls `_transfer` back, closing the call-graph cycle.
/// The recursive call is patched in after `_transfer` exists.
#[allow(clippy::too_many_arguments)]
fn build_reentry(
    e: &mut Emit,
    main: usize,
    helper: Option<usize>,
    helper_owner: Option<u32>,
    spec: &TokenSpec,
    vars: &Vars,
    reentry_name: &str,
    list_identifier: &str,
    message: &str,
    has_setter: bool,
    ctor_main: &mut Vec<u32>,
    ctor_helper: &mut Vec<u32>,
) -> (u32, Option<u32>) {
    let p_account = e.param(main, "account", "address");
    let p_amt = e.param(main, "amt", "uint");

    // The guarded membership check on the reentry function's own input.
    let check_in = |e: &mut Emit, c: usize, var: u32, key_decl: u32, key_name: &str| -> u32 {
        let key = e.ident(c, key_name, Some(key_decl));
        let cell = e.member(c, var, list_identifier, key);
        let cond = e.not(c, cell);
        e.require(c, cond, message)
    };

    let mut stmts: Vec<u32> = Vec::new();
    let var_decl = match spec.placement {
        Placement::Inline => {
            let var = e.state_var(main, list_identifier, "address_list", false);
            stmts.push(check_in(e, main, var, p_account, "account"));
            var
        }
        Placement::ViaModifier => {
            let var = e.state_var(main, list_identifier, "address_list", false);
            let m_acc = e.param(main, "account", "address");
            let stmt = check_in(e, main, var, m_acc, "account");
            let b = e.block(main, vec![stmt]);
            let m = e.modifier(main, MODIFIER_NAME, vec![m_acc], b);
            let arg = e.ident(main, "account", Some(p_account));
            let att = e.attach(main, m, MODIFIER_NAME, vec![arg]);
            // Attachment is stored on the reentry function below.
            stmts.push(att);
            var
        }
        Placement::ViaNestedFunction => {
            let var = e.state_var(main, list_identifier, "address_list", false);
            let depth = spec.nesting_depth.max(1);
            let mut inner: Option<u32> = None;
            for level in (1..=depth).rev() {
                let p_acc = e.param(main, "account", "address");
                let stmt = match inner {
                    None => check_in(e, main, var, p_acc, "account"),
                    Some(next_fn) => {
                        let a = e.ident(main, "account", Some(p_acc));
                        e.call(
                            main,
                            &format!("{NESTED_HELPER_PREFIX}{}", level + 1),
                            Some(next_fn),
                            vec![a],
                        )
                    }
                };
                let b = e.block(main, vec![stmt]);
                let f = e.function(
                    main,
                    &format!("{NESTED_HELPER_PREFIX}{level}"),
                    "internal",
                    vec![p_acc],
                    vec![],
                    b,
                );
                inner = Some(f);
            }
            let a = e.ident(main, "account", Some(p_account));
            stmts.push(e.call(main, &format!("{NESTED_HELPER_PREFIX}1"), inner, vec![a]));
            var
        }
        Placement::ViaExternalContract => {
            let h = helper.expect("helper contract exists for external placement");
            let var = e.state_var(h, list_identifier, "address_list", false);
            let p_acc = e.param(h, "account", "address");
            let stmt = check_in(e, h, var, p_acc, "account");
            let b = e.block(h, vec![stmt]);
            let f = e.function(
                h,
                EXTERNAL_CHECK_FUNCTION,
                "external",
                vec![p_acc],
                vec![],
                b,
            );
            let a = e.ident(main, "account", Some(p_account));
            stmts.push(e.low_call(
                main,
                &format!("{EXTERNAL_CONTRACT_NAME}.{EXTERNAL_CHECK_FUNCTION}"),
                Some(f),
                vec![a],
            ));
            var
        }
    };

    // The token's own address is pre-listed at deploy time.
    {
        let (c, init) = match spec.placement {
            Placement::ViaExternalContract => (helper.expect("helper exists"), ctor_helper),
            _ => (main, ctor_main),
        };
        let key = e.lit(c, "address(this)");
        let cell = e.member(c, var_decl, list_identifier, key);
        let tru = e.lit(c, "true");
        init.push(e.assign(c, cell, tru));
    }

    // Placeholder recursive call; the callee ref is patched once `_transfer`
    // exists. Args: (account, DEAD, amt).
    let a0 = e.ident(main, "account", Some(p_account));
    let dead = e.lit(main, "0xdead");
    let a2 = e.ident(main, "amt", Some(p_amt));
    let recall = e.call(main, "_transfer", None, vec![a0, dead, a2]);
    stmts.push(recall);

    // Separate the modifier attachment (if any) from body statements.
    let (attachments, body_stmts): (Vec<u32>, Vec<u32>) = match spec.placement {
        Placement::ViaModifier => {
            let att = stmts.remove(0);
            (vec![att], stmts)
        }
        _ => (vec![], stmts),
    };
    let b = e.block(main, body_stmts);
    let f = e.function(
        main,
        reentry_name,
        "public",
        vec![p_account, p_amt],
        attachments,
        b,
    );

    // Setter for the list, wherever the list lives.
    let setter = if has_setter {
        let (c, guard_owner, guard_hidden) = match spec.placement {
            Placement::ViaExternalContract => (helper.unwrap(), helper_owner.unwrap(), None),
            _ => (main, vars.owner, vars.hidden),
        };
        let p_a = e.param(c, "addr", "address");
        let p_v = e.param(c, "value", "bool");
        let guard = owner_guard(e, c, guard_owner, guard_hidden);
        let key = e.ident(c, "addr", Some(p_a));
        let cell = e.member(c, var_decl, list_identifier, key);
        let v = e.ident(c, "value", Some(p_v));
        let asg = e.assign(c, cell, v);
        let b = e.block(c, vec![guard, asg]);
        Some(e.function(c, "setBots", "public", vec![p_a, p_v], vec![], b))
    } else {
        None
    };

    dummy_initializer(e, main, spec, var_decl, list_identifier);

    (f, setter)
}

/// Setters and concealment artifacts for a non-callback trap.
#[allow(clippy::too_many_arguments)]
fn emit_trap_admin(
    e: &mut Emit,
    main: usize,
    helper: Option<usize>,
    helper_owner: Option<u32>,
    vars: &Vars,
    spec: &TokenSpec,
    site: &GuardSite,
    setter_name: &str,
    has_setter: bool,
) {
    let Some(var) = site.var_decl else { return };
    let var_name = trap_var_name(e, var);
    if has_setter {
        let (c, guard_owner, guard_hidden) = match spec.placement {
            Placement::ViaExternalContract => (helper.unwrap(), helper_owner.unwrap(), None),
            _ => (main, vars.owner, vars.hidden),
        };
        let p_v = e.param(c, "value", "uint");
        let guard = owner_guard(e, c, guard_owner, guard_hidden);
        let target = e.ident(c, &var_name, Some(var));
        let v = e.ident(c, "value", Some(p_v));
        let asg = e.assign(c, target, v);
        let b = e.block(c, vec![guard, asg]);
        e.function(c, setter_name, "public", vec![p_v], vec![], b);
    }
    dummy_initializer(e, main, spec, var, &var_name);
}

/// The never-called "initializer" of the dummy-function concealment: assigns
/// the trap variable an innocuous value, is private, and has no callers.
fn dummy_initializer(e: &mut Emit, main: usize, spec: &TokenSpec, var: u32, var_name: &str) {
    if !spec.conceals(Concealment::DummyFunction) {
        return;
    }
    let target = e.ident(main, var_name, Some(var));
    let zero = e.lit(main, "0");
    let asg = e.assign(main, target, zero);
    let b = e.block(main, vec![asg]);
    e.function(main, "initialize", "private", vec![], vec![], b);
}

fn trap_var_name(e: &Emit, var_id: u32) -> String {
    for c in &e.contracts {
        for n in &c.nodes {
            if n["id"] == var_id {
                return n["name"].as_str().unwrap_or_default().to_string();
            }
        }
    }
    String::new()
}

/// Rewrites the reentry function's placeholder `_transfer` call target.
fn patch_reentry_call(e: &mut Emit, main: usize, reentry_fn: u32, transfer_internal: u32) {
    // The placeholder is the only `call` named `_transfer` with null refs.
    let _ = reentry_fn;
    for n in e.contracts[main].nodes.iter_mut() {
        if n["kind"] == "call" && n["name"] == "_transfer" && n["refs"].is_null() {
            n["refs"] = json!(transfer_internal);
        }
    }
}

fn site_attachment(site: &GuardSite) -> Option<u32> {
    site.attachment
}
