//! Printing, parsing and kind checking of random programs.

mod common;

use proptest::prelude::*;

use probnetkat::dsl::{desugar, parse, pretty, typecheck, Kind};
use probnetkat::Program;

fn with_sugar() -> impl Strategy<Value = Program> {
    (common::predicate(), common::program(2, true, true), common::program(2, true, true)).prop_flat_map(
        |(t, p, q)| {
            prop_oneof![
                Just(Program::ite(t.clone(), p.clone(), q)),
                Just(Program::while_do(t, p.clone())),
                Just(Program::bounded_star(3, p)),
            ]
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pretty_then_parse_is_identity(p in common::program(4, true, true)) {
        prop_assert_eq!(parse(&pretty(&p)).unwrap(), p);
    }

    #[test]
    fn sugar_round_trips_and_desugars(p in with_sugar()) {
        prop_assert_eq!(parse(&pretty(&p)).unwrap(), p.clone());
        let d = desugar(&p).unwrap();
        prop_assert!(!d.any_node(&|n| matches!(n, Program::If(..) | Program::While(..))));
        prop_assert_eq!(typecheck(&d).unwrap(), typecheck(&p).unwrap());
    }

    #[test]
    fn predicates_are_predicates(t in common::predicate()) {
        prop_assert_eq!(typecheck(&t).unwrap(), Kind::Predicate);
        prop_assert_eq!(typecheck(&Program::neg(t.clone())).unwrap(), Kind::Predicate);
    }
}

#[test]
fn negating_a_command_is_a_kind_error() {
    let err = typecheck(&parse("~((pt:=1)*)").unwrap()).unwrap_err();
    assert!(err.to_string().contains("negation"), "{err}");
    assert!(typecheck(&parse("if pt:=1 then skip else drop").unwrap()).is_err());
}
