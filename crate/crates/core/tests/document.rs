// SPDX-License-Identifier: Apache-2.0

mod common;

use ccra::automata::Letter;
use ccra::cli::{parse_machine, serialize_machine, Machine};
use ccra::cra::intro_minblock_machine;
use ccra::reductions::{
    doubling_machine, equivalence_pair, semilinearity_instance, upper_boundedness_instance,
};
use ccra::semiring::SemiringKind;
use ccra::simulation::{build_n_ccra, build_z_ccra_with_output};
use ccra::vass::eliminate_nonzero_tests;
use ccra::Error;

fn round_trip(m: Machine) {
    let text = serialize_machine(&m);
    let back = parse_machine(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back, m);
    assert_eq!(serialize_machine(&back), text);
}

fn document_error(text: &str) -> String {
    match parse_machine(text) {
        Err(Error::Document(msg)) => msg,
        other => panic!("expected a document error, got {other:?}"),
    }
}

#[test]
fn generated_machines_round_trip() {
    let mut r = common::rng(21);
    for _ in 0..20 {
        round_trip(common::random_cra(&mut r, false).into());
        round_trip(common::random_wa(&mut r, 3, SemiringKind::Int).into());
    }
    round_trip(intro_minblock_machine().into());
    round_trip(doubling_machine(4).unwrap().into());
    for (_, v) in common::vass_suite() {
        round_trip(v.clone().into());
        round_trip(build_n_ccra(&v).unwrap().machine.into());
        round_trip(build_z_ccra_with_output(&v, 1).unwrap().machine.into());
        round_trip(semilinearity_instance(&v).unwrap().into());
        round_trip(equivalence_pair(&v).unwrap().right.into());
        round_trip(upper_boundedness_instance(&v).unwrap().into());
    }
}

#[test]
fn nonzero_machines_round_trip() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/machines/nonzero.json"
    ))
    .unwrap();
    let Machine::Vass(v) = parse_machine(&text).unwrap() else {
        panic!("nonzero.json is not a VASS");
    };
    assert!(v.uses_nonzero_tests());
    round_trip(v.clone().into());
    round_trip(eliminate_nonzero_tests(&v).unwrap().into());
}

const WA: &str = r#"{
  "type": "wa",
  "semiring": "nat",
  "states": ["s", "t"],
  "alphabet": ["a"],
  "initial": "s",
  "initial_weight": 0,
  "transitions": [
    {"from": "s", "letter": "a", "to": "t", "weight": 2},
    {"from": "t", "letter": null, "to": "s", "weight": "inf"}
  ],
  "finals": [{"state": "t", "weight": 1}]
}"#;

#[test]
fn hand_written_wa_parses() {
    let Machine::Wa(w) = parse_machine(WA).unwrap() else {
        panic!("not a WA");
    };
    assert!(w.nfa().has_epsilon());
    assert_eq!(w.evaluate(&[Letter::sym("a")]).unwrap().to_i64(), Some(3));
}

#[test]
fn negative_weight_under_nat_is_rejected() {
    let msg = document_error(&WA.replace(r#""weight": 2"#, r#""weight": -2"#));
    assert!(msg.contains("transitions[0].weight"), "{msg}");
    assert!(msg.contains("nat"), "{msg}");
    // The same document is fine over ℤ.
    assert!(parse_machine(
        &WA.replace(r#""weight": 2"#, r#""weight": -2"#)
            .replace("nat", "int")
    )
    .is_ok());
}

#[test]
fn undeclared_state_is_rejected() {
    let msg = document_error(&WA.replace(r#""to": "t", "weight": 2"#, r#""to": "u", "weight": 2"#));
    assert!(
        msg.contains("transitions[0].to") && msg.contains("`u`"),
        "{msg}"
    );
}

#[test]
fn unknown_fields_and_types_are_rejected() {
    let msg = document_error(&WA.replace(r#""initial": "s","#, r#""initial": "s", "colour": 1,"#));
    assert!(msg.contains("colour"), "{msg}");
    let msg = document_error(&WA.replace(r#""type": "wa""#, r#""type": "pda""#));
    assert!(msg.contains("pda"), "{msg}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let msg = document_error(&WA.replace(r#""alphabet": ["a"],"#, r#""alphabet": ["a"]"#));
    assert!(msg.contains("line 6"), "{msg}");
}

#[test]
fn letters_outside_the_alphabet_are_rejected() {
    let msg = document_error(&WA.replace(r#""letter": "a""#, r#""letter": "b""#));
    assert!(msg.contains("transitions[0].letter"), "{msg}");
}

#[test]
fn counter_letters_are_structured() {
    let v = r#"{"type": "vass", "dimension": 1, "states": ["p", "q"], "initial": "p", "target": "q",
        "transitions": [{"from": "p", "letter": {"op": "inc", "counter": 1}, "to": "q"}]}"#;
    assert!(parse_machine(v).is_ok());
    let msg = document_error(&v.replace(r#""op": "inc""#, r#""op": "jump""#));
    assert!(msg.contains("jump"), "{msg}");
    let msg = document_error(&v.replace(r#""counter": 1"#, r#""counter": 0"#));
    assert!(msg.contains("numbered from 1"), "{msg}");
    // A plain string is a symbol, even when it is spelled like a counter letter.
    let msg = document_error(&v.replace(r#"{"op": "inc", "counter": 1}"#, r#""inc1""#));
    assert!(msg.contains("`inc1` is not in the alphabet"), "{msg}");
}

#[test]
fn cra_matrices_are_checked() {
    let text = serialize_machine(&intro_minblock_machine().into());
    let msg = document_error(&text.replacen(r#"[0, "inf", "inf"],"#, r#"[0, "inf"],"#, 1));
    assert!(msg.contains("transitions[0].update"), "{msg}");
    // The constant register must stay pinned at 0.
    let msg = document_error(&text.replacen(r#"["inf", "inf", 0]"#, r#"["inf", "inf", 1]"#, 1));
    assert!(msg.contains("virtual register"), "{msg}");
}
