mod common;

use proptest::prelude::*;

use nsa::eval::{normalize, Value};
use nsa::rewrite::{normalize_to_normal_form, Engine, Mode, NormalForm};
use nsa::syntax::alpha_eq;
use nsa::syntax::ast::{Term, Type};
use nsa::syntax::gen::Gen;
use nsa::syntax::parse::parse_formula;
use nsa::syntax::print::print_formula;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_formulas_reparse(seed in any::<u64>()) {
        prop_assert!(common::random_roundtrip(seed, 8).is_ok());
    }

    #[test]
    fn recursor_equations(seed in any::<u64>()) {
        let r = common::recursor_equations(seed, 4);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn append_length_and_index(a in prop::collection::vec(0u64..20, 0..8), b in prop::collection::vec(0u64..20, 0..8)) {
        let ab = Term::Append(Box::new(common::list_term(&a)), Box::new(common::list_term(&b)));
        let v = normalize(&Term::len(ab.clone())).unwrap();
        prop_assert_eq!(v, Value::Num((a.len() + b.len()) as u64));
        let joined: Vec<u64> = a.iter().chain(&b).copied().collect();
        for (i, x) in joined.iter().enumerate() {
            prop_assert_eq!(normalize(&Term::idx(ab.clone(), Term::numeral(i as u64))).unwrap(), Value::Num(*x));
        }
        let m = normalize(&Term::max_nat(ab)).unwrap();
        prop_assert_eq!(m, Value::Num(joined.iter().copied().max().unwrap_or(0)));
    }

    #[test]
    fn prefix_is_a_prefix(a in prop::collection::vec(0u64..20, 0..8), n in 0u64..10) {
        let p = normalize(&Term::Prefix(Box::new(common::list_term(&a)), Box::new(Term::numeral(n)))).unwrap();
        let want: Vec<Value> = a.iter().take(n as usize).map(|&x| Value::Num(x)).collect();
        prop_assert_eq!(p, Value::Seq(want, Type::Nat));
    }

    /// Normalizing a normal form changes nothing, and normal forms survive printing.
    #[test]
    fn normalization_is_stable(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sig = g.signature().clone();
        let f = g.gen_closed_formula(4);
        let e = Engine::new(sig.clone(), Mode::P);
        if let Ok((nf, _)) = normalize_to_normal_form(&e, &f) {
            let text = print_formula(&nf.to_formula());
            let back = parse_formula(&text, &sig).unwrap();
            let nf2 = NormalForm::from_formula(&back).unwrap();
            prop_assert!(nf.equiv(&nf2));
            let (again, trace) = normalize_to_normal_form(&e, &back).unwrap();
            prop_assert!(trace.is_empty(), "{}", text);
            prop_assert!(alpha_eq(&again.to_formula(), &back));
        }
    }
}

/// The maximum of a list is at least every element and is one of them
/// when the list is nonempty; every list of length <= 6 over 0..=10.
#[test]
fn max_of_list_exhaustive() {
    let ctx = nsa::syntax::typing::Ctx::new();
    for xs in common::all_lists(6, 10) {
        let t = nsa::eval::max_of_list(&common::list_term(&xs), &ctx).unwrap();
        let Value::Num(m) = normalize(&t).unwrap() else {
            panic!("{xs:?}")
        };
        assert!(xs.iter().all(|&x| x <= m), "{xs:?} -> {m}");
        assert!(xs.is_empty() && m == 0 || xs.contains(&m), "{xs:?} -> {m}");
    }
}
