//! The builtin derivations: the family tree, the grandmother, the coherent
//! identity, rule-I/rule-O reconstructions of the parents, and the direct
//! coding chains. Conclusions are computed through the rule engine at build
//! time, so every proof here is checkable by construction.

use crate::axioms::{axiom_db, AxiomDb};
use crate::context::{ContextSet, CqComponents, NamedDecl};
use crate::grammar::parse_coeff;
use crate::proof::{Proof, ProofBuilder};
use crate::rules::{Instantiation, RuleKind};
use crate::symbol::ResourceSymbol;
use std::sync::OnceLock;

fn pure_psi() -> ContextSet {
    let mut c = ContextSet::new();
    c.declare_pure("psi", &["A", "B", "E"], &[]);
    c
}

fn pure_sigma_rbe() -> ContextSet {
    let mut c = ContextSet::new();
    c.declare_pure("sigma", &["R", "B", "E"], &[]);
    c
}

fn fact(c: &mut ContextSet, text: &str) {
    c.declare_fact(parse_coeff(text).expect("fact parses"));
}

/// Shared contexts for the grandmother and the direct-coding chains: ψ
/// purifies ρ, and σ is the classical-quantum state left by a remote
/// instrument acting on Alice's share, pure on (A', B, E E') per branch.
fn granny_contexts() -> ContextSet {
    let mut c = pure_psi();
    c.declare_cq("sigma", "X", CqComponents::Symbolic);
    c.declare_pure("sigma", &["Ap", "B", "E", "Ep"], &["X"]);
    c.declare_named(NamedDecl::Reduction {
        from: ResourceSymbol::stat("rho"),
        to: ResourceSymbol::stat("rhoA"),
    });
    c.declare_named(NamedDecl::Application {
        name: "Tp".into(),
        test: "rho".into(),
        result: "sigma_st".into(),
    });
    fact(&mut c, "I(X;B E)@sigma - 1/4");
    c
}

fn ccc_identity(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, ContextSet::new());
    let csd = b.axiom("coherent-sd");
    let cut = b.cancel(csd, "[qq]");
    let cobit_e = b.axiom("unit-cobit-e");
    let finite = b.o_removal(cut, cobit_e, "[qq]", "1/2", "1");
    let ctp = b.axiom("coherent-tp");
    let eq = b.step(RuleKind::EqualityIntro, &[finite, ctp], Instantiation::new());
    b.scale(eq, "1/2");
    b.finish("ccc-identity", "[q->qq] = 1/2[q->q] + 1/2[qq]")
}

fn hashing2_from_mother(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, pure_psi());
    let mother = b.axiom("mother");
    let tp = b.axiom("tp");
    let tp_scaled = b.scale(tp, "1/2 I(A;E)@psi");
    let rho = b.reflexivity("<rho>");
    let sum = b.add(rho, tp_scaled);
    let chain = b.trans(sum, mother);
    let cut = b.step_as(
        RuleKind::Cancel,
        &[chain],
        Instantiation::new().set("gamma", "1/2 I(A;E)@psi [qq]"),
        "<rho> + I(A;E)@psi [c->c] + o[qq] >= Icoh(A>B)@psi [qq]",
    );
    let _ = cut;
    b.finish(
        "hashing2-from-mother",
        "<rho> + I(A;E)@psi [c->c] + o[qq] >= Icoh(A>B)@psi [qq]",
    )
}

fn ntp2(db: &AxiomDb) -> Proof {
    let mut ctx = pure_psi();
    fact(&mut ctx, "Icoh(A>B)@psi");
    let mut b = ProofBuilder::new(db, ctx);
    let mother = b.axiom("mother");
    let tp = b.axiom("tp");
    let tp_scaled = b.scale(tp, "1/2 I(A;E)@psi");
    let rho = b.reflexivity("<rho>");
    let sum = b.add(rho, tp_scaled);
    let chain = b.trans(sum, mother);
    let hashing2 = b.step_as(
        RuleKind::Cancel,
        &[chain],
        Instantiation::new().set("gamma", "1/2 I(A;E)@psi [qq]"),
        "<rho> + I(A;E)@psi [c->c] + o[qq] >= Icoh(A>B)@psi [qq]",
    );
    let tp2 = b.scale(tp, "Icoh(A>B)@psi");
    let sum2 = b.add(hashing2, tp2);
    b.step_as(
        RuleKind::Cancel,
        &[sum2],
        Instantiation::new().set("gamma", "Icoh(A>B)@psi [qq]"),
        "<rho> + I(A;B)@psi [c->c] + o[qq] >= Icoh(A>B)@psi [q->q]",
    );
    b.finish(
        "ntp2",
        "<rho> + I(A;B)@psi [c->c] + o[qq] >= Icoh(A>B)@psi [q->q]",
    )
}

fn nsd_from_mother(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, pure_psi());
    let mother = b.axiom("mother");
    let sd = b.axiom("sd");
    let sd_scaled = b.scale(sd, "1/2 I(A;B)@psi");
    let extra = b.reflexivity("1/2 I(A;B)@psi [q->q]");
    let sum = b.add(mother, extra);
    b.trans(sum, sd_scaled);
    b.finish(
        "nsd-from-mother",
        "<rho> + H(A)@psi [q->q] >= I(A;B)@psi [c->c]",
    )
}

fn eac_from_father(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, pure_sigma_rbe());
    let father = b.axiom("father");
    let sd = b.axiom("sd");
    let sd_scaled = b.scale(sd, "1/2 I(R;B)@sigma");
    let extra = b.reflexivity("1/2 I(R;B)@sigma [qq]");
    let sum = b.add(father, extra);
    b.trans(sum, sd_scaled);
    b.finish(
        "eac-from-father",
        "<ch N> + H(R)@sigma [qq] >= I(R;B)@sigma [c->c]",
    )
}

fn lsd_from_father(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, pure_sigma_rbe());
    let father = b.axiom("father");
    let ed = b.axiom("ed");
    let ed_scaled = b.scale(ed, "1/2 I(R;E)@sigma");
    let extra = b.reflexivity("Icoh(R>B)@sigma [q->q]");
    let sum = b.add(ed_scaled, extra);
    let chain = b.trans(father, sum);
    b.cancel(chain, "1/2 I(R;E)@sigma [qq]");
    b.finish("lsd-from-father", "<ch N> + o[qq] >= Icoh(R>B)@sigma [q->q]")
}

fn ntp_from_hashing(db: &AxiomDb) -> Proof {
    let mut ctx = pure_psi();
    fact(&mut ctx, "Icoh(A>B)@psi");
    let mut b = ProofBuilder::new(db, ctx);
    let hashing = b.axiom("hashing");
    let tp = b.axiom("tp");
    let tp_scaled = b.scale(tp, "Icoh(A>B)@psi");
    let extra = b.reflexivity("2 Icoh(A>B)@psi [c->c]");
    let sum = b.add(hashing, extra);
    b.step_as(
        RuleKind::Transitivity,
        &[sum, tp_scaled],
        Instantiation::new(),
        "<rho> + I(A;B)@psi [c->c] >= Icoh(A>B)@psi [q->q]",
    );
    b.finish(
        "ntp-from-hashing",
        "<rho> + I(A;B)@psi [c->c] >= Icoh(A>B)@psi [q->q]",
    )
}

fn mother_from_hashing_rule_i(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, pure_psi());
    let hashing = b.axiom("hashing");
    let tau = b.step(
        RuleKind::Absolutize,
        &[hashing],
        Instantiation::new().set("from", "[c->c]").set("to", "[c->c:tau]"),
    );
    b.step(RuleKind::RuleI, &[tau], Instantiation::new());
    b.finish(
        "mother-from-hashing-ruleI",
        "<rho> + 1/2 I(A;E)@psi [q->q] >= 1/2 I(A;B)@psi [qq]",
    )
}

fn father_from_eac_rule_o(db: &AxiomDb) -> Proof {
    let mut ctx = pure_sigma_rbe();
    fact(&mut ctx, "I(R;E)@sigma - 1/4");
    let mut b = ProofBuilder::new(db, ctx);
    let eac = b.axiom("eac");
    let coherent = b.step(RuleKind::RuleO, &[eac], Instantiation::new());
    let relax = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "1")
            .set("name", "N")
            .set("test", "rho"),
    );
    let extra = b.reflexivity("H(R)@sigma [qq]");
    let sum = b.add(relax, extra);
    let chain = b.step_as(
        RuleKind::Transitivity,
        &[sum, coherent],
        Instantiation::new(),
        "<ch N> + (1/2 I(R;B)@sigma + 1/2 I(R;E)@sigma) [qq] >= 1/2 I(R;B)@sigma [qq] + 1/2 I(R;B)@sigma [q->q]",
    );
    let cut = b.cancel(chain, "1/2 I(R;B)@sigma [qq]");
    b.step(
        RuleKind::Closure,
        &[cut],
        Instantiation::new().set("symbol", "[qq]").set("margin", "1/8"),
    );
    b.finish(
        "father-from-eac-ruleO",
        "1/2 I(R;E)@sigma [qq] + <ch N> >= 1/2 I(R;B)@sigma [q->q]",
    )
}

fn mother_from_nsd_rule_o(db: &AxiomDb) -> Proof {
    let mut ctx = pure_psi();
    fact(&mut ctx, "I(A;E)@psi - 1/4");
    let mut b = ProofBuilder::new(db, ctx);
    let nsd = b.axiom_with(
        "nsd",
        Instantiation::new().set("tags", "rho=psi").set("names", "rho=rho"),
    );
    let coherent = b.step_as(
        RuleKind::RuleO,
        &[nsd],
        Instantiation::new(),
        "<rho> + (1/2 I(A;B)@psi + 1/2 I(A;E)@psi) [q->q] >= 1/2 I(A;B)@psi [qq] + 1/2 I(A;B)@psi [q->q]",
    );
    let cut = b.cancel(coherent, "1/2 I(A;B)@psi [q->q]");
    b.step(
        RuleKind::Closure,
        &[cut],
        Instantiation::new().set("symbol", "[q->q]").set("margin", "1/8"),
    );
    b.finish(
        "mother-from-nsd-ruleO",
        "<rho> + 1/2 I(A;E)@psi [q->q] >= 1/2 I(A;B)@psi [qq]",
    )
}

fn grandmother(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, granny_contexts());
    // instrument compression, with the purifying reference playing B E
    let ict = b.axiom_with(
        "ict2",
        Instantiation::new()
            .set("tags", "sigma=sigma")
            .set("labels", "R=B E")
            .set("names", "rho=rhoA"),
    );
    // apply the kept-copy instrument to Alice's share of the shared state
    let application = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "4")
            .set("ext", "rho")
            .set("name", "Tp")
            .set("test", "rhoA"),
    );
    let rho = b.reflexivity("<rho>");
    let sum = b.add(ict, rho);
    let supplied = b.trans(sum, application);
    // conditional instance of the mother on the ensemble
    let mother = b.axiom("mother");
    let conditioned = b.step(
        RuleKind::ConvexSplit,
        &[mother],
        Instantiation::new()
            .set("mode", "conditional")
            .set("sigma_tag", "sigma")
            .set("static_from", "rho")
            .set("static_to", "sigma_st")
            .set("tags", "psi=sigma")
            .set("labels", "A=Ap;E=E Ep")
            .set("require_pure", "Ap B E Ep|X"),
    );
    let comm = b.reflexivity("1/2 I(Ap;E Ep|X)@sigma [q->q]");
    let sum2 = b.add(supplied, comm);
    let chain = b.trans(sum2, conditioned);
    // derandomize the shared-randomness cost
    let cc = b.axiom("unit-c-cc");
    let cc_scaled = b.scale(cc, "1/4");
    let supply = b.weaken(
        cc_scaled,
        Some("<rho> + I(X;B E)@sigma [c->c] + 1/2 I(Ap;E Ep|X)@sigma [q->q]"),
        None,
    );
    b.step(
        RuleKind::Derandomize,
        &[chain, supply],
        Instantiation::new().set("z", "1").set("q", "1/4"),
    );
    b.finish(
        "grandmother",
        "1/2 I(Ap;E Ep|X)@sigma [q->q] + I(X;B E)@sigma [c->c] + <rho> >= 1/2 I(Ap;B|X)@sigma [qq]",
    )
}

fn dct_ntp(db: &AxiomDb) -> Proof {
    let mut ctx = granny_contexts();
    fact(&mut ctx, "Icoh(Ap>B X)@sigma");
    fact(
        &mut ctx,
        "I(Ap;B|X)@sigma + I(X;B E)@sigma - I(A;E)@psi",
    );
    fact(&mut ctx, "Icoh(A>B)@psi - 1/8");
    let mut b = ProofBuilder::new(db, ctx);
    let granny = b.step(
        RuleKind::Lemma,
        &[],
        Instantiation::new().set("name", "grandmother"),
    );
    let tp = b.axiom("tp");
    let tp_q = b.scale(tp, "1/2 I(Ap;E Ep|X)@sigma");
    let keep = b.reflexivity("<rho> + I(X;B E)@sigma [c->c]");
    let sum = b.add(tp_q, keep);
    let chain = b.trans(sum, granny);
    let cut = b.step_as(
        RuleKind::Cancel,
        &[chain],
        Instantiation::new().set("gamma", "1/2 I(Ap;E Ep|X)@sigma [qq]"),
        "<rho> + (I(X;B E)@sigma + I(Ap;E Ep|X)@sigma) [c->c] + o[qq] >= Icoh(Ap>B X)@sigma [qq]",
    );
    let tp_obj = b.scale(tp, "Icoh(Ap>B X)@sigma");
    let sum2 = b.add(cut, tp_obj);
    let qchan = b.step_as(
        RuleKind::Cancel,
        &[sum2],
        Instantiation::new().set("gamma", "Icoh(Ap>B X)@sigma [qq]"),
        "<rho> + (I(Ap;B|X)@sigma + I(X;B E)@sigma) [c->c] + o[qq] >= Icoh(Ap>B X)@sigma [q->q]",
    );
    let hashing = b.axiom("hashing");
    let supply = b.weaken(
        hashing,
        Some("<rho> + (I(Ap;B|X)@sigma + I(X;B E)@sigma) [c->c]"),
        Some("1/8 [qq]"),
    );
    b.o_removal(qchan, supply, "[qq]", "1", "1/8");
    b.finish(
        "dct-ntp",
        "<rho> + (I(Ap;B|X)@sigma + I(X;B E)@sigma) [c->c] >= Icoh(Ap>B X)@sigma [q->q]",
    )
}

fn dct_ed(db: &AxiomDb) -> Proof {
    let mut ctx = granny_contexts();
    fact(
        &mut ctx,
        "I(Ap;E Ep|X)@sigma + I(X;B E)@sigma - I(A;E)@psi",
    );
    fact(&mut ctx, "Icoh(A>B)@psi - 1/8");
    let mut b = ProofBuilder::new(db, ctx);
    let granny = b.step(
        RuleKind::Lemma,
        &[],
        Instantiation::new().set("name", "grandmother"),
    );
    let tp = b.axiom("tp");
    let tp_q = b.scale(tp, "1/2 I(Ap;E Ep|X)@sigma");
    let keep = b.reflexivity("<rho> + I(X;B E)@sigma [c->c]");
    let sum = b.add(tp_q, keep);
    let chain = b.trans(sum, granny);
    let cut = b.step_as(
        RuleKind::Cancel,
        &[chain],
        Instantiation::new().set("gamma", "1/2 I(Ap;E Ep|X)@sigma [qq]"),
        "<rho> + (I(Ap;E Ep|X)@sigma + I(X;B E)@sigma) [c->c] + o[qq] >= Icoh(Ap>B X)@sigma [qq]",
    );
    let hashing = b.axiom("hashing");
    let supply = b.weaken(
        hashing,
        Some("<rho> + (I(Ap;E Ep|X)@sigma + I(X;B E)@sigma) [c->c]"),
        Some("1/8 [qq]"),
    );
    b.o_removal(cut, supply, "[qq]", "1", "1/8");
    b.finish(
        "dct-ed",
        "<rho> + (I(Ap;E Ep|X)@sigma + I(X;B E)@sigma) [c->c] >= Icoh(Ap>B X)@sigma [qq]",
    )
}

fn crd_from_cqsw(db: &AxiomDb) -> Proof {
    let mut ctx = ContextSet::new();
    ctx.declare_classical("sigma", &["X"]);
    ctx.declare_classical("sigmacc", &["XA", "XB"]);
    ctx.declare_named(NamedDecl::Reduction {
        from: ResourceSymbol::protected("to_both", "rho"),
        to: ResourceSymbol::protected("deltab_X", "rhox"),
    });
    ctx.declare_named(NamedDecl::Application {
        name: "deltab_X".into(),
        test: "rhox".into(),
        result: "sigmacc".into(),
    });
    ctx.declare_named(NamedDecl::Application {
        name: "to_alice".into(),
        test: "rho".into(),
        result: "sigma".into(),
    });
    fact(&mut ctx, "H(XB)@sigmacc - H(X)@sigma");
    let mut b = ProofBuilder::new(db, ctx);
    let cqsw = b.axiom("cqsw2");
    let proper = b.step(RuleKind::ImproperToProper, &[cqsw], Instantiation::new());
    let discard = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "5")
            .set("from", "<src to_both : rho>")
            .set("to", "<src deltab_X : rhox>"),
    );
    let applied = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "2")
            .set("name", "deltab_X")
            .set("test", "rhox")
            .set("protected", "true"),
    );
    let faded = b.trans(discard, applied);
    let chain = b.trans(proper, faded);
    let crc = b.axiom_with(
        "cr-concentration",
        Instantiation::new()
            .set("tags", "rho=sigmacc")
            .set("names", "rho=sigmacc"),
    );
    let chain2 = b.trans(chain, crc);
    let bridged = b.weaken(chain2, None, Some("H(X)@sigma [cc]"));
    b.step(
        RuleKind::SourceFake,
        &[bridged],
        Instantiation::new().set("name", "to_alice").set("source", "rho"),
    );
    b.finish(
        "crd-from-cqsw",
        "<sigma> + H(X|B)@sigma [c->c] >= H(X)@sigma [cc]",
    )
}

fn cqrsp(db: &AxiomDb) -> Proof {
    let mut ctx = ContextSet::new();
    ctx.declare_classical("sigma", &["X", "Y"]);
    ctx.declare_named(NamedDecl::Pure { name: "id_S_B".into() });
    ctx.declare_named(NamedDecl::Composition {
        inner: "src_xa_a".into(),
        outer: "nbarp".into(),
        mid: Some("rhoxa".into()),
        composed: "nbp_a".into(),
    });
    ctx.declare_named(NamedDecl::Reduction {
        from: ResourceSymbol::protected("nbp_b", "rho"),
        to: ResourceSymbol::protected("id_S_B", "rho"),
    });
    ctx.declare_named(NamedDecl::Application {
        name: "src_xa_a".into(),
        test: "rho".into(),
        result: "sigma_src".into(),
    });
    fact(&mut ctx, "I(X;Y)@sigma - 1/4");
    let mut b = ProofBuilder::new(db, ctx);
    let crst = b.axiom_with(
        "crst-feedback",
        Instantiation::new()
            .set("labels", "XA=X;YB=Y")
            .set("names", "rho=rhoxa"),
    );
    let crst_geq = b.weaken(crst, None, None);
    let compose = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "3")
            .set("inner", "src_xa_a")
            .set("source", "rho")
            .set("outer", "nbarp")
            .set("protected", "true"),
    );
    let src = b.reflexivity("<src src_xa_a : rho>");
    let sum = b.add(src, crst_geq);
    let chain = b.trans(sum, compose);
    let schu = b.axiom("betav2-schumacher");
    let comm = b.reflexivity("H(B|Y)@sigma [q->q]");
    let sum2 = b.add(chain, comm);
    let chain2 = b.trans(sum2, schu);
    let discard = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "5")
            .set("from", "<src nbp_b : rho>")
            .set("to", "<src id_S_B : rho>"),
    );
    let chain3 = b.trans(chain2, discard);
    let cc = b.axiom("unit-c-cc");
    let cc_scaled = b.scale(cc, "1/4");
    let supply = b.weaken(
        cc_scaled,
        Some("<src src_xa_a : rho> + I(X;Y)@sigma [c->c] + H(B|Y)@sigma [q->q]"),
        None,
    );
    let derand = b.step(
        RuleKind::Derandomize,
        &[chain3, supply],
        Instantiation::new().set("z", "1").set("q", "1/4"),
    );
    let improper = b.step(
        RuleKind::ProperToImproper,
        &[derand],
        Instantiation::new().set("name", "src_xa_a").set("source", "rho"),
    );
    let apply_src = b.step(
        RuleKind::Relativize,
        &[],
        Instantiation::new()
            .set("item", "2")
            .set("name", "src_xa_a")
            .set("test", "rho")
            .set("protected", "true"),
    );
    let supply_o = b.weaken(
        apply_src,
        Some("<src src_xa_a : rho> + I(X;Y)@sigma [c->c] + H(B|Y)@sigma [q->q]"),
        None,
    );
    b.o_removal(improper, supply_o, "<sigma_src>", "1", "1");
    b.finish(
        "cqrsp",
        "<src src_xa_a : rho> + H(B|Y)@sigma [q->q] + I(X;Y)@sigma [c->c] >=s <src id_S_B : rho>",
    )
}

fn absolutize_qubit(db: &AxiomDb) -> Proof {
    let mut b = ProofBuilder::new(db, ContextSet::new());
    let sim = b.axiom("absolutizy-q");
    let cut = b.cancel(sim, "2[cc]");
    let supply = b.axiom("unit-qtau-cc");
    let finite = b.o_removal(cut, supply, "[cc]", "1", "1");
    let back = b.axiom("unit-q-qtau");
    b.step(RuleKind::EqualityIntro, &[finite, back], Instantiation::new());
    b.finish("absolutize-qubit", "[q->q:tau] = [q->q]")
}

fn build_all() -> Vec<Proof> {
    let db = axiom_db();
    vec![
        ccc_identity(&db),
        hashing2_from_mother(&db),
        ntp2(&db),
        nsd_from_mother(&db),
        eac_from_father(&db),
        lsd_from_father(&db),
        ntp_from_hashing(&db),
        mother_from_hashing_rule_i(&db),
        father_from_eac_rule_o(&db),
        mother_from_nsd_rule_o(&db),
        grandmother(&db),
        dct_ntp(&db),
        dct_ed(&db),
        crd_from_cqsw(&db),
        cqrsp(&db),
        absolutize_qubit(&db),
    ]
}

static BUILTINS: OnceLock<Vec<Proof>> = OnceLock::new();

/// All builtin derivations, built once and checked at construction time.
pub fn builtin_derivations() -> &'static [Proof] {
    BUILTINS.get_or_init(build_all)
}

pub fn builtin(name: &str) -> Option<&'static Proof> {
    // `grandmother` is referenced as a lemma while the list is being built,
    // so construct it directly when the cache is not ready yet.
    if let Some(list) = BUILTINS.get() {
        return list.iter().find(|p| p.name == name);
    }
    if name == "grandmother" {
        static GRANNY: OnceLock<Proof> = OnceLock::new();
        return Some(GRANNY.get_or_init(|| grandmother(&axiom_db())));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_check() {
        let db = axiom_db();
        let proofs = builtin_derivations();
        assert!(proofs.len() >= 15, "only {} builtins", proofs.len());
        for p in proofs {
            p.check(&db).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn proofs_round_trip_through_json() {
        let db = axiom_db();
        for p in builtin_derivations() {
            let text = p.to_json();
            let back = Proof::from_json(&text).unwrap();
            back.check(&db)
                .unwrap_or_else(|e| panic!("{} after round trip: {e}", p.name));
        }
    }
}
