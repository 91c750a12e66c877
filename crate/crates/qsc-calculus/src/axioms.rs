//! The axiom catalog: unit protocols, coding theorems, and the parent
//! inequalities, each stated in the text grammar with its structural context
//! and side conditions.

use crate::context::{ContextSet, NamedDecl};
use crate::error::{CalcError, Result};
use crate::expr::{DecouplingFlag, ResourceInequality, Side};
use crate::grammar::parse_ri;
use crate::symbol::ResourceSymbol;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Axiom {
    pub name: String,
    pub ri: ResourceInequality,
    pub side_conditions: Vec<String>,
    pub source_ref: String,
    pub contexts: ContextSet,
}

pub struct AxiomDb {
    axioms: Vec<Axiom>,
}

impl AxiomDb {
    pub fn all(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn lookup(&self, name: &str) -> Result<&Axiom> {
        self.axioms
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| CalcError::UnknownAxiom(name.to_string()))
    }
}

struct Builder {
    axioms: Vec<Axiom>,
}

impl Builder {
    fn push(
        &mut self,
        name: &str,
        ri_text: &str,
        source_ref: &str,
        side_conditions: &[&str],
        contexts: ContextSet,
        flags: &[(Side, ResourceSymbol, DecouplingFlag)],
    ) {
        let mut ri = parse_ri(ri_text)
            .unwrap_or_else(|e| panic!("axiom `{name}` fails to parse: {e}"));
        for (side, sym, flag) in flags {
            ri = ri
                .with_flag(*side, sym.clone(), *flag)
                .unwrap_or_else(|e| panic!("axiom `{name}` flag: {e}"));
        }
        self.axioms.push(Axiom {
            name: name.to_string(),
            ri,
            side_conditions: side_conditions.iter().map(|s| s.to_string()).collect(),
            source_ref: source_ref.to_string(),
            contexts,
        });
    }
}

fn pure_ctx(tag: &str, family: &[&str]) -> ContextSet {
    let mut c = ContextSet::new();
    c.declare_pure(tag, family, &[]);
    c
}

fn classical_ctx(tag: &str, labels: &[&str]) -> ContextSet {
    let mut c = ContextSet::new();
    c.declare_classical(tag, labels);
    c
}

/// Build the full axiom database.
pub fn axiom_db() -> AxiomDb {
    let mut b = Builder { axioms: Vec::new() };
    let coh = DecouplingFlag::Coherent;

    // ---- noiseless unit protocols -------------------------------------
    b.push(
        "tp",
        "2[c->c] + [qq] >= [q->q]",
        "unit protocols: teleportation",
        &[],
        ContextSet::new(),
        &[],
    );
    b.push(
        "sd",
        "[q->q] + [qq] >= 2[c->c]",
        "unit protocols: super-dense coding",
        &[],
        ContextSet::new(),
        &[],
    );
    b.push(
        "ed",
        "[q->q] >= [qq]",
        "unit protocols: entanglement distribution",
        &[],
        ContextSet::new(),
        &[],
    );
    b.push(
        "coherent-tp",
        "[q->q] + [qq] >= 2[q->qq]",
        "unit protocols: coherent super-dense coding circuit",
        &[],
        ContextSet::new(),
        &[],
    );
    b.push(
        "coherent-sd",
        "2[q->qq] + [qq] >= [q->q] + 2[qq]",
        "unit protocols: coherent teleportation circuit",
        &[],
        ContextSet::new(),
        &[],
    );

    // ---- unit facts ----------------------------------------------------
    b.push("unit-q-c", "[q->q] >= [c->c]", "unit facts", &[], ContextSet::new(), &[]);
    b.push("unit-cobit-e", "[q->qq] >= [qq]", "unit facts", &[], ContextSet::new(), &[]);
    b.push("unit-cobit-c", "[q->qq] >= [c->c]", "unit facts", &[], ContextSet::new(), &[]);
    b.push("unit-c-cc", "[c->c] >= [cc]", "unit facts", &[], ContextSet::new(), &[]);
    b.push("unit-qtau-cc", "[q->q:tau] >= [cc]", "unit facts", &[], ContextSet::new(), &[]);
    b.push("unit-q-qtau", "[q->q] >= [q->q:tau]", "unit facts: relativization", &[], ContextSet::new(), &[]);
    b.push("unit-c-ctau", "[c->c] >= [c->c:tau]", "unit facts: relativization", &[], ContextSet::new(), &[]);
    b.push(
        "unit-cobit-cobittau",
        "[q->qq] >= [q->qq:tau]",
        "unit facts: relativization",
        &[],
        ContextSet::new(),
        &[],
    );

    // ---- randomness-assisted absolutization simulations ----------------
    b.push(
        "absolutizy-q",
        "[q->q:tau] + 2[cc] >= [q->q] + 2[cc]",
        "twirl simulation: qubit channel",
        &["shared randomness is incoherently decoupled"],
        ContextSet::new(),
        &[],
    );
    b.push(
        "absolutizy-cobit",
        "[q->qq:tau] + 2[cc] >= [q->qq] + 2[cc]",
        "twirl simulation: coherent channel",
        &["shared randomness is incoherently decoupled"],
        ContextSet::new(),
        &[],
    );
    b.push(
        "absolutizy-c",
        "[c->c:tau] + [cc] >= [c->c] + [cc]",
        "twirl simulation: classical channel",
        &["shared randomness is incoherently decoupled"],
        ContextSet::new(),
        &[],
    );

    // ---- compression and randomness theorems ---------------------------
    b.push(
        "schumacher",
        "H(A)@rho [q->q] >= <ch id_A_B : rho>",
        "quantum source compression",
        &["holds iff the rate margin is nonnegative"],
        ContextSet::new(),
        &[],
    );
    b.push(
        "ent-concentration",
        "<phi> >= H(B)@phi [qq]",
        "entanglement concentration",
        &[],
        pure_ctx("phi", &["A", "B"]),
        &[],
    );
    b.push(
        "ent-dilution",
        "H(B)@phi [qq] + o[c->c] >= <phi>",
        "entanglement dilution",
        &["the sublinear classical term cannot be removed"],
        pure_ctx("phi", &["A", "B"]),
        &[],
    );
    b.push(
        "ent-concentration-cc",
        "<phi> + inf[c->c] >= H(B)@phi [qq]",
        "entanglement concentration, unlimited classical communication",
        &[],
        pure_ctx("phi", &["A", "B"]),
        &[],
    );
    b.push(
        "shannon-compression",
        "H(X)@rho [c->c] >= <ch idbar_X : rho>",
        "classical source compression",
        &["holds iff the rate margin is nonnegative"],
        classical_ctx("rho", &["X"]),
        &[],
    );
    b.push(
        "cr-concentration",
        "<rho> >= H(XB)@rho [cc]",
        "common randomness concentration",
        &[],
        classical_ctx("rho", &["XA", "XB"]),
        &[],
    );
    b.push(
        "cr-dilution",
        "H(XB)@rho [cc] >= <rho>",
        "common randomness dilution",
        &[],
        classical_ctx("rho", &["XA", "XB"]),
        &[],
    );
    b.push(
        "crst",
        "I(XA;YB)@sigma [c->c] + H(XA|YB)@sigma [cc] >= <ch nbar : rho>",
        "classical reverse Shannon theorem",
        &[],
        classical_ctx("sigma", &["XA", "YB"]),
        &[],
    );
    b.push(
        "crst-feedback",
        "I(XA;YB)@sigma [c->c] + H(XA|YB)@sigma [cc] = <ch nbarp : rho>",
        "classical reverse Shannon theorem, feedback variant",
        &["the feedback channel keeps a sender-side copy of the output"],
        classical_ctx("sigma", &["XA", "YB"]),
        &[],
    );
    b.push(
        "cqsw",
        "H(X|B)@sigma [c->c] + <src to_alice : rho> >=s <src to_bob : rho>",
        "classical compression with quantum side information",
        &["holds iff the rate margin is nonnegative"],
        classical_ctx("sigma", &["X"]),
        &[],
    );
    b.push(
        "cqsw2",
        "H(X|B)@sigma [c->c] + <src to_alice : rho> >=s <src to_both : rho>",
        "classical compression with quantum side information, sender keeps a copy",
        &[],
        classical_ctx("sigma", &["X"]),
        &[],
    );
    b.push(
        "ict",
        "I(R;X)@sigma [c->c] + H(X|R)@sigma [cc] >= <ch T : rho>",
        "instrument compression theorem",
        &[],
        classical_ctx("sigma", &["X"]),
        &[],
    );
    b.push(
        "ict2",
        "I(R;X)@sigma [c->c] + H(X|R)@sigma [cc] >= <ch Tp : rho>",
        "instrument compression theorem, sender keeps a copy of the outcome",
        &[],
        classical_ctx("sigma", &["X"]),
        &[],
    );
    b.push(
        "betav2-schumacher",
        "H(B|Y)@sigma [q->q] + <src nbp_a : rho> >= <src nbp_b : rho>",
        "quantum compression against classical side information",
        &["the classical side channel output is held by both parties"],
        classical_ctx("sigma", &["Y"]),
        &[],
    );

    // ---- channel coding theorems ---------------------------------------
    b.push(
        "hsw",
        "<ch N : rho> >= I(X;B)@sigma [c->c]",
        "classical capacity of a quantum channel",
        &["holds iff the rate margin is nonnegative"],
        classical_ctx("sigma", &["X"]),
        &[],
    );
    b.push(
        "shannon-coding",
        "<ch nbar> >= I(XA;YB)@sigma [c->c]",
        "classical channel coding",
        &["holds iff the rate margin is nonnegative"],
        classical_ctx("sigma", &["XA", "YB"]),
        &[],
    );
    b.push(
        "eac",
        "<ch N : rho> + H(R)@sigma [qq] >= I(R;B)@sigma [c->c]",
        "entanglement-assisted classical capacity",
        &["classical output coherently decoupled"],
        pure_ctx("sigma", &["R", "B", "E"]),
        &[(Side::Rhs, ResourceSymbol::Cbit, coh)],
    );
    b.push(
        "lsd",
        "<ch N> >= Icoh(R>B)@sigma [q->q]",
        "quantum channel capacity",
        &[],
        pure_ctx("sigma", &["R", "B", "E"]),
        &[],
    );
    b.push(
        "nsd",
        "<rho> + H(A)@rho [q->q] >= I(A;B)@rho [c->c]",
        "noisy super-dense coding",
        &["classical output coherently decoupled"],
        ContextSet::new(),
        &[(Side::Rhs, ResourceSymbol::Cbit, coh)],
    );
    b.push(
        "hashing",
        "<rho> + I(A;E)@psi [c->c] >= Icoh(A>B)@psi [qq]",
        "one-way entanglement distillation (hashing bound)",
        &[
            "classical input coherently decoupled",
            "classical input uniformly random",
        ],
        pure_ctx("psi", &["A", "B", "E"]),
        &[(Side::Lhs, ResourceSymbol::Cbit, coh)],
    );
    b.push(
        "state-merging",
        "<src merge_u : rho> + I(A;E)@psi [c->c] + H(A|B)@psi [qq] >=s <src id_S_B : rho>",
        "state merging",
        &["holds irrespective of the sign of the conditional entropy"],
        pure_ctx("psi", &["A", "B", "E"]),
        &[],
    );
    b.push(
        "ntp",
        "<rho> + I(A;B)@psi [c->c] >= Icoh(A>B)@psi [q->q]",
        "noisy teleportation",
        &[],
        pure_ctx("psi", &["A", "B", "E"]),
        &[],
    );
    b.push(
        "cqrsp",
        "<src to_alice : rho> + H(B|Y)@sigma [q->q] + I(X;Y)@sigma [c->c] >=s <src id_S_B : rho>",
        "quantum compression with classical side information",
        &[],
        classical_ctx("sigma", &["X", "Y"]),
        &[],
    );
    b.push(
        "crd",
        "<rho> + H(X|B)@rho [c->c] >= H(X)@rho [cc]",
        "common randomness distillation",
        &[],
        classical_ctx("rho", &["X"]),
        &[],
    );

    // ---- the parents ----------------------------------------------------
    b.push(
        "mother",
        "<rho> + 1/2 I(A;E)@psi [q->q] >= 1/2 I(A;B)@psi [qq]",
        "parent inequality, static",
        &[],
        pure_ctx("psi", &["A", "B", "E"]),
        &[],
    );
    b.push(
        "father",
        "1/2 I(R;E)@sigma [qq] + <ch N> >= 1/2 I(R;B)@sigma [q->q]",
        "parent inequality, dynamic",
        &[],
        pure_ctx("sigma", &["R", "B", "E"]),
        &[],
    );

    // state merging's partner declarations travel with the axiom
    if let Some(a) = b.axioms.iter_mut().find(|a| a.name == "state-merging") {
        a.contexts.declare_named(NamedDecl::Pure { name: "id_S_B".into() });
    }

    AxiomDb { axioms: b.axioms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_ri, print_ri};

    #[test]
    fn db_has_enough_axioms() {
        let db = axiom_db();
        assert!(db.all().len() >= 28, "only {} axioms", db.all().len());
    }

    #[test]
    fn all_axioms_round_trip_through_grammar() {
        let db = axiom_db();
        for a in db.all() {
            let text = print_ri(&a.ri);
            let back = parse_ri(&text).unwrap_or_else(|e| panic!("{}: {e}", a.name));
            assert_eq!(a.ri, back, "axiom {}", a.name);
        }
    }

    #[test]
    fn lookups() {
        let db = axiom_db();
        let mother = db.lookup("mother").unwrap();
        assert_eq!(
            print_ri(&mother.ri),
            "1/2 I(A;E)@psi [q->q] + <rho> >= 1/2 I(A;B)@psi [qq]"
        );
        let ccc_units = db.lookup("coherent-sd").unwrap();
        assert_eq!(print_ri(&ccc_units.ri), "2[q->qq] + [qq] >= [q->q] + 2[qq]");
        let hashing = db.lookup("hashing").unwrap();
        assert_eq!(hashing.ri.flags.len(), 1);
        assert!(db.lookup("nope").is_err());
    }
}
