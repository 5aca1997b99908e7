//! Shared inputs for the reqlens benchmarks.

use reqlens_core::{build_model, parse_source, ClassDecl, Model};

pub const CORPUS: [(&str, &str); 3] = [
    ("corpus/book.rsl", include_str!("../../../corpus/book.rsl")),
    (
        "corpus/library.rsl",
        include_str!("../../../corpus/library.rsl"),
    ),
    (
        "corpus/roborace.rsl",
        include_str!("../../../corpus/roborace.rsl"),
    ),
];

pub fn corpus_classes() -> Vec<ClassDecl> {
    CORPUS
        .iter()
        .flat_map(|(file, text)| parse_source(file, text).classes)
        .collect()
}

pub fn corpus_model() -> Model {
    build_model(corpus_classes()).expect("the corpus resolves")
}
