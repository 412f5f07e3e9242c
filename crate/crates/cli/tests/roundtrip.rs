use proptest::prelude::*;

use regulus_cli::ast::*;
use regulus_cli::parser::parse_syntax;
use regulus_cli::{parse, Program};

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,5}".prop_filter("reserved", |s| s != "out")
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        name(),
        "[0-9]{1,3}".prop_map(|s| s.trim_start_matches('0').to_string()).prop_filter("empty", |s| !s.is_empty()),
        // Already in NFC, so normalization leaves them unchanged.
        "[a-z \"\\\\é,()]{0,6}",
    ]
}

fn context_lit() -> impl Strategy<Value = ContextLit> {
    (prop::collection::vec(name(), 0..4), prop::collection::vec(name(), 0..3))
        .prop_map(|(ports, extra)| ContextLit { ports, extra })
}

fn context_ref() -> impl Strategy<Value = ContextRef> {
    prop_oneof![name().prop_map(ContextRef::Named), context_lit().prop_map(ContextRef::Literal)]
}

fn port_ref() -> impl Strategy<Value = PortRef> {
    let shell = prop_oneof![
        name().prop_map(ShellRef::Named),
        (1usize..5).prop_map(ShellRef::Position),
        Just(ShellRef::Out),
    ];
    (shell, 1usize..9).prop_map(|(shell, index)| PortRef { shell, index })
}

fn decl() -> impl Strategy<Value = Decl> {
    let context = (name(), context_lit()).prop_map(|(name, value)| Decl::Context(ContextDecl { name, value }));
    let node = (name(), name(), prop::collection::vec(port_ref(), 1..4))
        .prop_map(|(name, ty, ports)| NodeDecl { name, ty, ports });
    let rel = (
        name(),
        prop::collection::vec(context_ref(), 0..3),
        context_ref(),
        prop::collection::vec(node, 0..4),
        prop::collection::vec(name(), 0..3),
    )
        .prop_map(|(name, inner, outer, nodes, support)| {
            Decl::Rel(RelDecl {
                name,
                inner,
                outer,
                nodes,
                support,
            })
        });
    let item = prop_oneof![
        (name(), prop::collection::vec(atom(), 0..4)).prop_map(|(name, atoms)| ModelItem::Type { name, atoms }),
        (name(), context_ref(), prop::collection::vec(prop::collection::vec(atom(), 0..3), 0..3))
            .prop_map(|(name, on, tuples)| ModelItem::Pred { name, on, tuples }),
    ];
    let model = (name(), prop::collection::vec(item, 0..4)).prop_map(|(name, items)| Decl::Model(ModelDecl { name, items }));
    let term = (name(), name(), prop::collection::vec(name(), 0..4))
        .prop_map(|(name, rel, leaves)| Decl::Term(TermDecl { name, rel, leaves }));
    prop_oneof![context, rel, model, term]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(decls in prop::collection::vec(decl(), 0..6)) {
        let p = Program { decls };
        let printed = p.to_string();
        let reparsed = parse_syntax(&printed).unwrap();
        prop_assert_eq!(&reparsed, &p);
        prop_assert_eq!(reparsed.to_string(), printed);
    }
}

#[test]
fn fixtures_survive_parse_print_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    assert!(entries.len() >= 5);
    for path in entries {
        let src = std::fs::read_to_string(&path).unwrap();
        let once = parse(&src).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        assert_eq!(once, twice, "{}", path.display());
    }
}
