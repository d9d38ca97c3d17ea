use gcoupling_cli::report::{format_float, Value};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::Int),
        any::<f64>().prop_map(Value::Num),
        "[a-z\"\\\\ ]{0,6}".prop_map(Value::Str),
    ]
}

fn tree() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::List),
            prop::collection::vec(("[a-z]{1,3}", inner), 0..4).prop_map(|kv| {
                kv.into_iter().fold(Value::map(), |m, (k, v)| m.with(&k, v))
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn finite_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = format_float(v).parse().unwrap();
        prop_assert_eq!(back, if v == 0.0 { 0.0 } else { v });
        prop_assert!(back.to_bits() == v.to_bits() || v == 0.0);
    }

    #[test]
    fn json_is_valid_and_independent_of_insertion_order(kv in prop::collection::vec(("[a-z]{1,3}", tree()), 0..6)) {
        let forward = kv.iter().cloned().fold(Value::map(), |m, (k, v)| m.with(&k, v));
        let mut dedup = std::collections::BTreeMap::new();
        for (k, v) in &kv {
            dedup.insert(k.clone(), v.clone());
        }
        let reverse = dedup.into_iter().rev().fold(Value::map(), |m, (k, v)| m.with(&k, v));
        let text = forward.to_json();
        prop_assert_eq!(&text, &reverse.to_json());
        prop_assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok(), "{}", text);
    }
}
