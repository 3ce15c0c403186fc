mod common;

use causal_control::dsl::DiagnosticKind;
use causal_control::{parse, parse_document, parse_expression, serialize, Expr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kinds(text: &str) -> Vec<DiagnosticKind> {
    parse(text).unwrap_err().0.iter().map(|d| d.kind).collect()
}

#[test]
fn declarations_in_any_order() {
    let text = common::fixture("icecream.scm");
    let mut lines: Vec<&str> = text.lines().collect();
    lines.reverse();
    let reversed = parse(&lines.join("\n")).unwrap();
    let original = common::load("icecream.scm");
    assert_eq!(reversed.variables()[0].name, "Y");
    for v in original.variables() {
        assert_eq!(reversed.variable(&v.name), Some(v));
        assert_eq!(reversed.assignment(&v.name), original.assignment(&v.name));
    }
    for n in original.noises() {
        assert_eq!(reversed.noise(&n.name), Some(n));
    }
}

#[test]
fn fixtures_round_trip() {
    for name in ["icecream.scm", "appendix_b_q3_10.scm", "confounded_xor.scm"] {
        let scm = common::load(name);
        assert_eq!(parse(&serialize(&scm)).unwrap(), scm, "{name}");
    }
}

#[test]
fn rationals_are_exact() {
    let scm = parse("var X in {0,1,2}\nnoise N ~ categorical(0:0.25, 1:3/8, 2:0.375)\nassign X := N\n").unwrap();
    let d = &scm.noise("N").unwrap().distribution;
    assert_eq!(d.masses(), &[common::rat(1, 4), common::rat(3, 8), common::rat(3, 8)]);
}

#[test]
fn uniform_takes_the_readers_range() {
    let scm = parse("var X in {2, 5, 7}\nnoise N ~ uniform\nassign X := N\n").unwrap();
    let d = &scm.noise("N").unwrap().distribution;
    assert_eq!(d.support(), &[2, 5, 7]);
    assert!(d.is_uniform());
    assert!(serialize(&scm).contains("~ uniform"));
    assert!(parse("var X in {0,1}\nnoise N ~ uniform\nassign X := 0\n").is_err());
}

#[test]
fn precedence() {
    let e = parse_expression("1 + 2 * 3 mod 4 == 3").unwrap();
    assert_eq!(e.to_string(), "1 + 2 * 3 mod 4 == 3");
    assert!(matches!(e, Expr::Compare { .. }));
    let e = parse_expression("(1 + 2) * 3").unwrap();
    assert_eq!(e.to_string(), "(1 + 2) * 3");
    let e = parse_expression("if A > 0 then 1 else if B then 2 else 3").unwrap();
    assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
    assert!(parse_expression("1 < 2 < 3").is_err());
    assert!(parse_expression("1 / 2").is_err());
}

#[test]
fn diagnostics_are_positioned() {
    let err = parse("var X in {0,1}\nassign X := Z\n").unwrap_err();
    assert_eq!((err.0[0].line, err.0[0].kind), (2, DiagnosticKind::UnknownIdentifier));
    assert_eq!(err.0[0].column, 13);

    assert_eq!(kinds("var X in {0,1}\nvar X in {0,1}\nassign X := 0\n"), vec![DiagnosticKind::Duplicate]);
    assert_eq!(kinds("var X in {0,1}\nassign X := 0 +\n"), vec![DiagnosticKind::Syntax]);
    assert_eq!(kinds("var X in {0,1}\nassign X := 0 ? 1\n"), vec![DiagnosticKind::Lexical]);
    assert_eq!(
        kinds("var X in {0,1}\nnoise N ~ categorical(0:1/2, 1:1/3)\nassign X := N\n"),
        vec![DiagnosticKind::Probability]
    );
    assert_eq!(kinds("var X in {0,1}\nassign X := 2\n"), vec![DiagnosticKind::Validation]);
}

#[test]
fn comments_are_kept_in_documents() {
    let doc = parse_document("# header\nvar X in {0} # trailing\nassign X := 0\n").unwrap();
    let comments = doc
        .items
        .iter()
        .filter(|i| matches!(i, causal_control::dsl::Item::Comment { .. }))
        .count();
    assert_eq!(comments, 2);
}

#[test]
fn deep_nesting_is_an_error_not_a_crash() {
    let deep = format!("var X in {{0}}\nassign X := {}0{}\n", "(".repeat(5000), ")".repeat(5000));
    assert!(parse(&deep).is_err());
    let negs = format!("var X in {{0}}\nassign X := {}0\n", "- ".repeat(5000));
    assert!(parse(&negs).is_err());
}

#[test]
fn fuzzed_inputs_never_crash() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let seeds: Vec<String> = ["icecream.scm", "appendix_b_q3_10.scm", "confounded_xor.scm"]
        .iter()
        .map(|n| common::fixture(n))
        .collect();
    let mut accepted = 0;
    for i in 0..20_000 {
        let text = if i % 4 == 0 {
            common::fuzz::soup(&mut rng)
        } else {
            common::fuzz::mutate(&seeds[i % seeds.len()], &mut rng)
        };
        accepted += usize::from(common::fuzz::check(&text).unwrap());
    }
    assert!(accepted > 0);
}
