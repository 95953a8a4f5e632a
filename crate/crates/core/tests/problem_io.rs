use antdesign::problem::{
    generate_problem, parse_problem, serialize_problem, DesignProblem, ProblemError, ProblemScale,
};
use proptest::prelude::*;

fn scale() -> impl Strategy<Value = ProblemScale> {
    (1usize..=25, 1usize..=25).prop_flat_map(|(a, m)| {
        (Just(a), Just(m), m..=a * m, 1usize..=(a + m).min(8))
            .prop_map(|(a, m, u, c)| ProblemScale::new(a, m, u, c))
    })
}

proptest! {
    #[test]
    fn generated_instances_round_trip(scale in scale(), seed in any::<u64>()) {
        let problem = generate_problem(scale, seed).unwrap();
        prop_assert_eq!(problem.scale(), scale);
        let text = serialize_problem(&problem);
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(&back, &problem);
        prop_assert_eq!(serialize_problem(&back), text);
    }

    #[test]
    fn every_method_uses_something(scale in scale(), seed in any::<u64>()) {
        let problem = generate_problem(scale, seed).unwrap();
        for m in 0..scale.methods {
            prop_assert!(problem.uses().iter().any(|u| u.method == m));
        }
    }
}

#[test]
fn generation_is_seeded() {
    let a = generate_problem(ProblemScale::GDP, 4).unwrap();
    assert_eq!(a, generate_problem(ProblemScale::GDP, 4).unwrap());
    assert_ne!(a, generate_problem(ProblemScale::GDP, 5).unwrap());
}

#[test]
fn infeasible_scales_are_rejected() {
    for bad in [
        ProblemScale::new(0, 3, 3, 2),
        ProblemScale::new(2, 2, 5, 2),
        ProblemScale::new(3, 4, 3, 2),
        ProblemScale::new(1, 1, 1, 3),
    ] {
        assert!(matches!(generate_problem(bad, 1), Err(ProblemError::Infeasible(_))), "{bad:?}");
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let ok = r#"{"name":"x","classCount":2,"attributes":["a"],"methods":["m"],"uses":[["m","a"]]}"#;
    assert!(parse_problem(ok).is_ok());
    let cases = [
        "not json",
        r#"{"name":"x","classCount":2,"attributes":["a"],"methods":["m"],"uses":[["m","b"]]}"#,
        r#"{"name":"x","classCount":2,"attributes":["a","a"],"methods":["m"],"uses":[["m","a"]]}"#,
        r#"{"name":"x","classCount":0,"attributes":["a"],"methods":["m"],"uses":[["m","a"]]}"#,
        r#"{"name":"x","classCount":3,"attributes":["a"],"methods":["m"],"uses":[["m","a"]]}"#,
        r#"{"name":"x","classCount":2,"attributes":["a"],"methods":["m"],"uses":[]}"#,
        r#"{"name":"x","classCount":2,"attributes":["a"],"methods":["m"],"uses":[["m","a"],["m","a"]]}"#,
        r#"{"name":"x","classCount":2,"attributes":["a"],"methods":["m"],"uses":[["m","a"]],"extra":1}"#,
    ];
    for doc in cases {
        assert!(parse_problem(doc).is_err(), "{doc}");
    }
}

#[test]
fn label_lookup() {
    let p = DesignProblem::new("t", vec!["x".into(), "y".into()], vec!["f".into()], vec![(0, 1)], 2).unwrap();
    let y = p.attribute_by_label("y").unwrap();
    assert_eq!(p.label(y), "y");
    assert!(p.method_by_label("y").is_none());
}
