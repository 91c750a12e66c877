//! Property tests for the expression algebra: commutativity/associativity of
//! addition, scale distributivity, normalize idempotence.

use proptest::prelude::*;
use qsc_calculus::*;

fn arb_symbol() -> impl Strategy<Value = ResourceSymbol> {
    prop_oneof![
        Just(ResourceSymbol::Cbit),
        Just(ResourceSymbol::Qubit),
        Just(ResourceSymbol::Ebit),
        Just(ResourceSymbol::Rbit),
        Just(ResourceSymbol::Cobit),
        Just(ResourceSymbol::stat("rho")),
        Just(ResourceSymbol::chan("N")),
        Just(ResourceSymbol::chan_rel("N", "w")),
    ]
}

fn arb_atom() -> impl Strategy<Value = EntropicAtom> {
    prop_oneof![
        Just(EntropicAtom::h(&["A"], "s")),
        Just(EntropicAtom::mutual(&["A"], &["B"], "s")),
        Just(EntropicAtom::mutual(&["A"], &["E"], "s")),
        Just(EntropicAtom::coherent(&["A"], &["B"], "s")),
        Just(EntropicAtom::h_cond(&["A"], &["B"], "s")),
    ]
}

fn arb_coeff() -> impl Strategy<Value = Coefficient> {
    (
        -6i64..6,
        1i64..4,
        proptest::option::of((arb_atom(), -4i64..5, 1i64..3)),
    )
        .prop_map(|(n, d, atom)| {
            let mut c = Coefficient::from_rat(rat(n, d));
            if let Some((a, an, ad)) = atom {
                c = c.add(&Coefficient::atom_scaled(a, rat(an, ad)));
            }
            c
        })
}

fn arb_expr() -> impl Strategy<Value = ResourceExpr> {
    (
        proptest::collection::vec((arb_symbol(), arb_coeff()), 0..5),
        proptest::collection::vec(arb_symbol(), 0..2),
    )
        .prop_map(|(terms, os)| {
            let mut e = ResourceExpr::empty();
            for (s, c) in terms {
                e = e.add(&ResourceExpr::term(s, c));
            }
            for s in os {
                e = e.add(&ResourceExpr::o(s));
            }
            e
        })
}

fn ctx() -> ContextSet {
    let mut c = ContextSet::new();
    c.declare_pure("s", &["A", "B", "E"], &[]);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn add_commutes(a in arb_expr(), b in arb_expr()) {
        let basis = IdentityBasis::empty();
        let ctx = ctx();
        prop_assert!(expr_eq(&a.add(&b), &b.add(&a), &basis, &ctx));
    }

    #[test]
    fn add_associates(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
        let basis = IdentityBasis::empty();
        let ctx = ctx();
        prop_assert!(expr_eq(&a.add(&b).add(&c), &a.add(&b.add(&c)), &basis, &ctx));
    }

    #[test]
    fn scale_distributes_over_add(a in arb_expr(), b in arb_expr(), n in 0i64..5, d in 1i64..4) {
        let basis = IdentityBasis::empty();
        let ctx = ctx();
        let z = Coefficient::from_rat(rat(n, d));
        let lhs = a.add(&b).scale(&z, &[]).unwrap();
        let rhs = a.scale(&z, &[]).unwrap().add(&b.scale(&z, &[]).unwrap());
        prop_assert!(expr_eq(&lhs, &rhs, &basis, &ctx));
    }

    #[test]
    fn scale_adds_in_the_scalar(a in arb_expr(), n in 0i64..4, m in 0i64..4) {
        // (z + w) a = z a + w a, for rational z and w
        let basis = IdentityBasis::empty();
        let ctx = ctx();
        let z = Coefficient::from_rat(rat(n, 2));
        let w = Coefficient::from_rat(rat(m, 3));
        let lhs = a.scale(&z.add(&w), &[]).unwrap();
        let rhs = a.scale(&z, &[]).unwrap().add(&a.scale(&w, &[]).unwrap());
        prop_assert!(expr_eq(&lhs, &rhs, &basis, &ctx));
    }

    #[test]
    fn normalize_is_idempotent(a in arb_expr()) {
        let basis = IdentityBasis::empty();
        let ctx = ctx();
        let once = normalize(&a, &basis, &ctx);
        let twice = normalize(&once, &basis, &ctx);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn grammar_round_trip(a in arb_expr()) {
        let text = qsc_calculus::grammar::print_expr(&a);
        let back = qsc_calculus::grammar::parse_expr(&text).unwrap();
        // parse(print(a)) merges exactly like a's own canonical map
        let basis = IdentityBasis::empty();
        let c = ContextSet::new();
        prop_assert!(expr_eq(&a, &back, &basis, &c), "text: {}", text);
    }
}

#[test]
fn normalize_idempotent_on_1000_seeded_expressions() {
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let syms = [
        ResourceSymbol::Cbit,
        ResourceSymbol::Qubit,
        ResourceSymbol::Ebit,
        ResourceSymbol::Cobit,
        ResourceSymbol::stat("rho"),
    ];
    let basis = IdentityBasis::empty();
    let ctx = ctx();
    for _ in 0..1000 {
        let mut e = ResourceExpr::empty();
        for _ in 0..rng.gen_range(0..6) {
            let s = syms[rng.gen_range(0..syms.len())].clone();
            let c = Coefficient::from_rat(rat(rng.gen_range(-5..6), rng.gen_range(1..4)));
            e = e.add(&ResourceExpr::term(s, c));
        }
        if rng.gen_bool(0.3) {
            e = e.add(&ResourceExpr::o(syms[rng.gen_range(0..syms.len())].clone()));
        }
        let once = normalize(&e, &basis, &ctx);
        assert_eq!(once, normalize(&once, &basis, &ctx));
    }
}
