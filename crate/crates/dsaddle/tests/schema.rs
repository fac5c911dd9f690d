use std::fs;
use std::path::Path;
use std::process::Command;

use dsaddle_core::invertibility::{ConditionId, Rule};
use dsaddle_core::Family;
use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schema")
        .join(format!("{name}.schema.json"));
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{what}: {errors:#?}\n{doc:#}");
}

/// Parsed stdout, or `Null` when the command printed nothing.
fn json_stdout(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_dsaddle"))
        .args(args)
        .output()
        .unwrap();
    if out.stdout.is_empty() {
        return Value::Null;
    }
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn reports_validate_against_published_schemas() {
    let (diagnosis, inverse, instance, verify) = (
        schema("diagnosis"),
        schema("inverse"),
        schema("instance"),
        schema("verify"),
    );
    let mut verdicts = std::collections::BTreeSet::new();
    let mut constructors = std::collections::BTreeSet::new();
    for family in Family::ALL {
        for seed in 0..3u64 {
            let work = tempfile::tempdir().unwrap();
            let inst = work.path().join("inst");
            let out = work.path().join("inv");
            let (i, o) = (inst.to_str().unwrap(), out.to_str().unwrap());
            let seed = seed.to_string();
            let what = format!("{family} seed {seed}");
            let family = family.as_str();

            let doc = json_stdout(&[
                "generate", "--family", family, "--seed", &seed, "--out", i, "--format", "json",
            ]);
            assert_valid(&instance, &doc, &what);
            let on_disk: Value =
                serde_json::from_str(&fs::read_to_string(inst.join("certificate.json")).unwrap())
                    .unwrap();
            assert_eq!(doc, on_disk);

            for extra in [&[][..], &["--oracle"][..]] {
                let mut args = vec!["diagnose", i, "--format", "json"];
                args.extend_from_slice(extra);
                let doc = json_stdout(&args);
                assert_valid(&diagnosis, &doc, &what);
                verdicts.insert(doc["verdict"].as_str().unwrap().to_owned());
            }

            let doc = json_stdout(&["invert", i, "--out", o, "--format", "json", "--allow-dense"]);
            if !doc.is_null() {
                assert_valid(&inverse, &doc, &what);
                constructors.insert(doc["constructor"].as_str().unwrap().to_owned());
            }

            assert_valid(
                &verify,
                &json_stdout(&["verify", i, "--format", "json"]),
                &what,
            );
        }
    }
    assert_eq!(verdicts.len(), 3, "{verdicts:?}");
    // The factorization hypotheses imply the three-block ones, so the CLI
    // never falls through to it.
    assert_eq!(
        constructors,
        ["dense", "three_block"].map(String::from).into(),
        "{constructors:?}"
    );
}

#[test]
fn family_specs_validate_against_generator_schema() {
    let v = schema("generator-spec");
    for family in Family::ALL {
        for seed in 0..5 {
            let spec = serde_json::to_value(family.spec(seed, 12)).unwrap();
            assert_valid(&v, &spec, family.as_str());
        }
    }
    assert!(!v.is_valid(&serde_json::json!({"n": 2, "bogus": true})));
}

#[test]
fn serialized_names_match_display_names() {
    for rule in Rule::ALL {
        assert_eq!(serde_json::to_value(rule).unwrap(), rule.as_str());
    }
    for id in ConditionId::ALL {
        assert_eq!(serde_json::to_value(id).unwrap(), id.as_str());
    }
    for family in Family::ALL {
        assert_eq!(serde_json::to_value(family).unwrap(), family.as_str());
    }
}
