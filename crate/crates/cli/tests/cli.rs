use std::path::PathBuf;

use regulus::{Port, TypeSym};
use regulus_cli::{main_with_args, CliError, Workspace};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn load(name: &str) -> Workspace {
    Workspace::load(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn run(args: &[&str]) -> (String, u8) {
    let out = main_with_args(std::iter::once("regulus").chain(args.iter().copied()));
    (out.text, out.code)
}

#[test]
fn wiring_fixture_resolves_to_seven_blocks() {
    let ws = load("wiring.rlog");
    let omega = ws.relation("omega").unwrap();
    assert_eq!(omega.num_blocks(), 7);
    let support: Vec<&str> = omega.support().iter().map(TypeSym::name).collect();
    assert_eq!(support, ["v", "w", "x", "y", "z"]);
    // Block of the first outer port joins Γ1.3 and Γ3.1.
    let b = omega.block_of(Port::outer(0));
    assert_eq!(omega.block_of(Port::inner(0, 2)), b);
    assert_eq!(omega.block_of(Port::inner(2, 0)), b);
}

#[test]
fn port_in_two_nodes_names_both() {
    let src = "rel r : [x] -> [x] { node a : x = @1.1, out.1; node b : x = @1.1; }";
    match Workspace::load(src) {
        Err(CliError::PortInTwoNodes { first, second, port, .. }) => {
            assert_eq!((first.as_str(), second.as_str(), port.as_str()), ("a", "b", "@1.1"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn ill_typed_node_is_reported_by_name() {
    let src = "rel r : [x, y] -> [] { node a : x = @1.1, @1.2; }";
    match Workspace::load(src) {
        Err(CliError::IllTypedNode { node, found, .. }) => assert_eq!((node.as_str(), found.as_str()), ("a", "y")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_port_and_bad_references_are_resolution_errors() {
    for src in [
        "rel r : [x] -> [x] { node a : x = @1.1; }",
        "rel r : G -> [] { }",
        "context A = [x]\nrel r : A, A -> [] { node a : x = A.1, @2.1; }",
        "context out = [x]",
        "context A = [x]\ncontext A = [y]",
        "term t = rel missing with ()",
    ] {
        assert!(matches!(Workspace::load(src), Err(CliError::Resolution(_))), "{src}");
    }
}

#[test]
fn empty_program_loads() {
    assert!(Workspace::load("").unwrap().program.decls.is_empty());
}

#[test]
fn leq_exit_codes_follow_breaking_direction() {
    let f = fixture("breaking.rlog");
    assert_eq!(run(&["leq", &f, "broken", "connected"]), ("false\n".into(), 1));
    assert_eq!(run(&["leq", &f, "connected", "broken"]), ("true\n".into(), 0));
    assert_eq!(run(&["leq", &f, "dotted", "plain"]).1, 0);
    assert_eq!(run(&["leq", &f, "plain", "dotted"]).1, 1);
}

#[test]
fn leq_verdict_matches_library() {
    let ws = load("breaking.rlog");
    let f = fixture("breaking.rlog");
    for a in ["connected", "broken"] {
        for b in ["connected", "broken"] {
            let lib = ws.relation(a).unwrap().leq(ws.relation(b).unwrap()).unwrap();
            assert_eq!(run(&["leq", &f, a, b]).1 == 0, lib);
        }
    }
}

#[test]
fn contain_prints_witness_and_refuses_converse() {
    let f = fixture("breaking.rlog");
    let (text, code) = run(&["contain", &f, "t_joined", "t_split"]);
    assert_eq!(code, 0);
    assert_eq!(text, "true\nwitness: v1 -> v1, v2 -> v1\n");
    assert_eq!(run(&["contain", &f, "t_split", "t_joined"]).1, 1);
}

#[test]
fn eval_diagonal_term() {
    let f = fixture("basics.rlog");
    assert_eq!(
        run(&["eval", &f, "diag", "--model", "M"]),
        ("{(a,a),(b,b)}\n".into(), 0)
    );
    assert_eq!(run(&["eval", &f, "both", "--model", "M"]), ("{}\n".into(), 0));
    assert_eq!(run(&["eval", &f, "nested", "--model", "M"]), ("{(a)}\n".into(), 0));
}

#[test]
fn entail_in_model() {
    let f = fixture("basics.rlog");
    assert_eq!(run(&["entail", &f, "only_a", "everything", "--model", "M"]).1, 0);
    let (text, code) = run(&["entail", &f, "everything", "only_a", "--model", "M"]);
    assert_eq!(code, 1);
    assert_eq!(text, "false\ncounterexample: {(b)}\n");
}

#[test]
fn compose_identity_with_itself() {
    let f = fixture("basics.rlog");
    let ws = load("basics.rlog");
    let expected = format!("{}\n", ws.relation("id_G").unwrap());
    assert_eq!(run(&["compose", &f, "id_G", "id_G"]), (expected, 0));
}

#[test]
fn substitute_into_slot() {
    let f = fixture("basics.rlog");
    let (text, code) = run(&["substitute", &f, "meet", "2", "id_G"]);
    assert_eq!(code, 0);
    let ws = load("basics.rlog");
    assert_eq!(text, format!("{}\n", ws.relation("meet").unwrap()));
    assert_eq!(run(&["substitute", &f, "meet", "3", "id_G"]).1, 2);
}

#[test]
fn errors_exit_with_two() {
    let f = fixture("basics.rlog");
    assert_eq!(run(&["eval", &f, "diag"]).1, 2);
    assert_eq!(run(&["eval", &f, "diag", "--model", "Nope"]).1, 2);
    assert_eq!(run(&["compose", &f, "delta", "delta"]).1, 2);
    assert_eq!(run(&["leq", "/nonexistent/file.rlog", "a", "b"]).1, 2);
    assert_eq!(run(&["frobnicate", &f]).1, 2);
    assert_eq!(run(&["leq", &f, "id_G", "id_G", "--format", "dot"]).1, 2);
}

#[test]
fn composite_dot_matches_golden() {
    let f = fixture("comp_as_subst.rlog");
    let (text, code) = run(&["compose", &f, "omega_prime", "omega", "--format", "dot"]);
    assert_eq!(code, 0);
    assert_eq!(text, golden("comp_as_subst.dot"));
    assert!(text.contains("label=\"t,w,x,z\""));
}

#[test]
fn term_dot_matches_golden() {
    let f = fixture("wiring.rlog");
    let (text, code) = run(&["emit-dot", &f, "filled"]);
    assert_eq!(code, 0);
    assert_eq!(text, golden("wiring.dot"));
}

#[test]
fn identity_dot_is_two_clusters_and_one_edge() {
    let f = fixture("basics.rlog");
    let (text, _) = run(&["emit-dot", &f, "id_G"]);
    assert_eq!(text.matches("subgraph cluster_").count(), 2);
    assert_eq!(text.matches(" -- ").count(), 1);
    assert!(text.contains("  s1p1 -- outp1;\n"));
    assert!(!text.contains("shape=point"));
}

#[test]
fn formula_of_wiring_term() {
    let f = fixture("wiring.rlog");
    let (text, code) = run(&["emit-formula", &f, "filled"]);
    assert_eq!(code, 0);
    assert_eq!(
        text,
        "{ v3:y, v6:z, o3:z, v5:x, v4:x, v7:z | exists v1:x. exists v2:y. P(v1, v2, v3) & Q(v4, v1, v5) & \
         R(v3, v2, v4, v4) & o3 = v6 & inhabited(v) & inhabited(w) }\n"
    );
}

#[test]
fn syncat_commands() {
    let f = fixture("functions.rlog");
    let (text, code) = run(&["syncat-check", &f, "swap:FX:FX", "--model", "M"]);
    assert_eq!(code, 0);
    assert!(text.contains("function: true\nmono: true\nregular epi: true\n"));
    let (text, _) = run(&["syncat-check", &f, "partial:FX:FX", "--model", "M"]);
    assert!(text.contains("defect: not total"));
    let (text, _) = run(&["syncat-check", &f, "swap:A:A", "--model", "M"]);
    assert_eq!(text, "relation: false\n");
    let (text, code) = run(&["syncat-image", &f, "collapse:FX:FY", "--model", "M"]);
    assert_eq!(code, 0);
    assert!(text.contains("image: {(c)}") && text.contains("recomposes: true"));
    let (text, code) = run(&["syncat-pullback", &f, "collapse:FX:FY", "collapse:FX:FY", "--model", "M"]);
    assert_eq!(code, 0);
    assert!(text.contains("universal property: true"));
    assert_eq!(run(&["syncat-image", &f, "fan:FX:FX", "--model", "M"]).1, 2);
    assert_eq!(run(&["syncat-check", &f, "swap:FX", "--model", "M"]).1, 2);
}

#[test]
fn json_output_is_valid() {
    let f = fixture("comp_as_subst.rlog");
    let (text, _) = run(&["compose", &f, "omega_prime", "omega", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["white_dot"], serde_json::json!(["t", "w", "x", "z"]));
    assert_eq!(v["blocks"].as_array().unwrap().len(), 1);
}

#[test]
fn outputs_are_identical_across_runs() {
    let w = fixture("wiring.rlog");
    let c = fixture("comp_as_subst.rlog");
    let cmds: Vec<Vec<&str>> = vec![
        vec!["emit-dot", &w, "filled"],
        vec!["emit-formula", &w, "filled"],
        vec!["compose", &c, "omega_prime", "omega"],
    ];
    for cmd in &cmds {
        let first = run(cmd);
        for _ in 0..3 {
            assert_eq!(run(cmd), first);
        }
    }
}
