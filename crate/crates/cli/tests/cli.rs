use dpalg_cli::json::{element_from_json, element_json, omega_from_json, omega_json, ElementJson, OmegaJson};
use dpalg_cli::{eval, parse, run};
use dpalg_core::coeff::Ring;
use dpalg_core::dpcore::AlgebraSpec;
use dpalg_core::kahler::universal_derivation;
use dpalg_core::laws::random_element;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<std::sync::Arc<AlgebraSpec>> {
    vec![
        AlgebraSpec::uniform(Ring::Integers, 1, 8).unwrap(),
        AlgebraSpec::uniform(Ring::Integers, 2, 6).unwrap(),
        AlgebraSpec::new(Ring::integers_mod(6).unwrap(), vec![1, 2, 3], 7).unwrap(),
        AlgebraSpec::uniform(Ring::integers_mod(4).unwrap(), 3, 5).unwrap(),
    ]
}

#[test]
fn printed_forms_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in specs() {
        for _ in 0..60 {
            let a = &random_element(&spec, &mut rng) * &random_element(&spec, &mut rng);
            let b = random_element(&spec, &mut rng);
            for e in [a, b] {
                let text = e.to_string();
                let back = eval(&parse(&text, spec.generator_count()).unwrap(), &spec).unwrap();
                assert_eq!(back, e, "{text}");
            }
        }
    }
}

#[test]
fn json_reparses_to_the_same_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in specs() {
        for _ in 0..25 {
            let e = random_element(&spec, &mut rng);
            let j = element_json(&e).unwrap();
            let text = serde_json::to_string(&j).unwrap();
            let back: ElementJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, j);
            assert_eq!(element_from_json(&back, &spec).unwrap(), e);

            let w = universal_derivation(&e);
            let j = omega_json(&w).unwrap();
            let back: OmegaJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
            assert_eq!(back, j);
            assert_eq!(omega_from_json(&back, &spec).unwrap(), w);
        }
    }
}

#[test]
fn documented_examples() {
    let out = run(["dpalg", "normalize", "--ring", "z", "--gens", "1", "--trunc", "8", "g2(x1)*g3(x1)"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "10*g5(x1)\n"));

    let out = run(["dpalg", "gamma", "2", "--trunc", "8", "g2(x1)"]);
    assert_eq!(out.stdout, "3*g4(x1)\n");

    let out = run(["dpalg", "diff", "--ring", "z", "--gens", "1", "--trunc", "4", "g4(x1)"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "g3(x1)*dx1 + g2(x1)*phi2*dx1 + x1*phi3*dx1 + phi2^2*dx1\n");

    let out = run(["dpalg", "oracle-omega", "--ring", "zmod=6", "--gens", "1", "--trunc", "4", "--json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    for part in ["main_theorem", "indecomposables"] {
        let slices = v[part]["slices"].as_array().unwrap();
        assert_eq!(slices.len(), 4);
        assert!(slices.iter().all(|s| s["equal"] == true));
    }
}

#[test]
fn json_output_of_commands_reparses() {
    let out = run(["dpalg", "normalize", "--gens", "2", "--trunc", "5", "--json", "-x1*x2 + g2(x1 + 3*x2)"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let j: ElementJson = serde_json::from_str(&out.stdout).unwrap();
    let spec = AlgebraSpec::uniform(Ring::Integers, 2, 5).unwrap();
    let e = element_from_json(&j, &spec).unwrap();
    assert_eq!(e.to_string(), "g2(x1) + 2*x1*x2 + 9*g2(x2)");

    let out = run(["dpalg", "diff", "--ring", "zmod=4", "--trunc", "5", "--json", "g4(x1)"]);
    let j: OmegaJson = serde_json::from_str(&out.stdout).unwrap();
    let spec = AlgebraSpec::uniform(Ring::integers_mod(4).unwrap(), 1, 5).unwrap();
    let w = omega_from_json(&j, &spec).unwrap();
    assert_eq!(w, universal_derivation(&eval(&parse("g4(x1)", 1).unwrap(), &spec).unwrap()));
    assert!(out.stdout.find("\"ring\"").unwrap() < out.stdout.find("\"terms\"").unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(["dpalg", "normalize", "g0(x1)"]).code, 2);
    assert!(run(["dpalg", "normalize", "g0(x1)"]).stderr.contains("exponent must be >= 1"));
    assert_eq!(run(["dpalg", "normalize", "x2"]).code, 2);
    assert_eq!(run(["dpalg", "normalize", "5"]).code, 2);
    assert_eq!(run(["dpalg", "normalize", "--ring", "zmod=1", "x1"]).code, 2);
    assert_eq!(run(["dpalg", "normalize", "--gens", "2", "--weights", "1", "x1"]).code, 2);
    assert_eq!(run(["dpalg", "gamma", "0", "x1"]).code, 2);
    assert_eq!(run(["dpalg", "frobnicate"]).code, 2);
    assert_eq!(run(["dpalg", "--help"]).code, 0);
    assert_eq!(run(["dpalg", "normalize", "0"]).stdout, "0\n");
    for suite in ["axioms", "congruence", "gcd", "inversion", "beck", "remark54"] {
        let out = run(["dpalg", "check", suite, "--ring", "zmod=6", "--gens", "2", "--trunc", "5", "--samples", "40"]);
        assert_eq!(out.code, 0, "{suite}: {}", out.stdout);
    }
}

#[test]
fn output_is_deterministic() {
    let argv = ["dpalg", "check", "axioms", "--json", "--gens", "2", "--trunc", "6", "--seed", "9", "--samples", "50"];
    let first = run(argv);
    assert_eq!(first, run(argv));
    let other = run(["dpalg", "oracle-omega", "--json", "--gens", "2", "--trunc", "3", "--seed", "4"]);
    assert_eq!(other, run(["dpalg", "oracle-omega", "--json", "--gens", "2", "--trunc", "3", "--seed", "4"]));
    assert_eq!(other.code, 0);
}
