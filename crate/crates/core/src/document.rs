//! Notebook-like documents, the knowledge-browser outline and knowledge-base
//! selection.
//!
//! Documents are stored as JSON (`*.tmadoc.json`):
//!
//! ```json
//! {"id": "ex1", "title": "Exercises", "cells": [
//!   {"type": "section", "title": "Basics", "cells": [
//!     {"type": "text", "content": "A warm-up."},
//!     {"type": "env", "kind": "theorem", "name": "T",
//!      "formulas": [{"label": "1", "formula": "P -> P"}]}
//!   ]}
//! ]}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse_formula, render_formula, Formula, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Definition,
    Axiom,
    Lemma,
    Proposition,
    Theorem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledFormula {
    pub label: String,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub kind: EnvKind,
    pub name: String,
    pub formulas: Vec<LabeledFormula>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Section { title: String, cells: Vec<Cell> },
    Text(String),
    Env(Environment),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub cells: Vec<Cell>,
}

/// Points at one labeled formula of one environment of one document.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FormulaRef {
    pub document: String,
    pub environment: String,
    pub label: String,
}

impl FormulaRef {
    pub fn new(
        document: impl Into<String>,
        environment: impl Into<String>,
        label: impl Into<String>,
    ) -> Self {
        Self {
            document: document.into(),
            environment: environment.into(),
            label: label.into(),
        }
    }

    /// `Env.label`, the name shown for the formula in proofs.
    pub fn display_label(&self) -> String {
        format!("{}.{}", self.environment, self.label)
    }
}

impl fmt::Display for FormulaRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}.{}", self.document, self.environment, self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbEntry {
    pub reference: FormulaRef,
    pub display_label: String,
    pub formula: Formula,
}

/// The formulas available as assumptions in a proof, in document order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub entries: Vec<KbEntry>,
}

impl KnowledgeBase {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A knowledge base built directly from `(display label, formula)` pairs.
    pub fn from_formulas<'a>(items: impl IntoIterator<Item = (&'a str, Formula)>) -> Self {
        let entries = items
            .into_iter()
            .map(|(label, formula)| {
                let (env, lab) = label.rsplit_once('.').unwrap_or(("KB", label));
                KbEntry {
                    reference: FormulaRef::new("", env, lab),
                    display_label: label.to_string(),
                    formula,
                }
            })
            .collect();
        Self { entries }
    }

    pub fn get(&self, display_label: &str) -> Option<&KbEntry> {
        self.entries
            .iter()
            .find(|e| e.display_label == display_label)
    }
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Format(String),
    #[error("formula {environment}.{label}: {source}")]
    Parse {
        environment: String,
        label: String,
        #[source]
        source: ParseError,
    },
    #[error("duplicate label \"{label}\" in environment {environment}")]
    DuplicateLabel { environment: String, label: String },
    #[error("duplicate environment name \"{0}\"")]
    DuplicateEnvironment(String),
    #[error("cannot resolve formula reference {0}")]
    Resolve(FormulaRef),
}

// On-disk representation.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    id: String,
    title: String,
    cells: Vec<RawCell>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawCell {
    Section {
        title: String,
        cells: Vec<RawCell>,
    },
    Text {
        content: String,
    },
    Env {
        kind: EnvKind,
        name: String,
        formulas: Vec<RawFormula>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFormula {
    label: String,
    formula: String,
}

impl Document {
    /// Reads and validates a document from its JSON form.
    pub fn load(mut source: impl Read) -> Result<Self, DocumentError> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| DocumentError::Format(e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument =
            serde_json::from_str(text).map_err(|e| DocumentError::Format(e.to_string()))?;
        let mut names = BTreeSet::new();
        let cells = convert_cells(raw.cells, &mut names)?;
        let doc = Document {
            id: raw.id,
            title: raw.title,
            cells,
        };
        doc.check_arities()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("documents serialize")
    }

    fn to_raw(&self) -> RawDocument {
        fn cell(c: &Cell) -> RawCell {
            match c {
                Cell::Section { title, cells } => RawCell::Section {
                    title: title.clone(),
                    cells: cells.iter().map(cell).collect(),
                },
                Cell::Text(content) => RawCell::Text {
                    content: content.clone(),
                },
                Cell::Env(env) => RawCell::Env {
                    kind: env.kind,
                    name: env.name.clone(),
                    formulas: env
                        .formulas
                        .iter()
                        .map(|lf| RawFormula {
                            label: lf.label.clone(),
                            formula: render_formula(&lf.formula),
                        })
                        .collect(),
                },
            }
        }
        RawDocument {
            id: self.id.clone(),
            title: self.title.clone(),
            cells: self.cells.iter().map(cell).collect(),
        }
    }

    /// All environments in document order.
    pub fn environments(&self) -> Vec<&Environment> {
        fn walk<'a>(cells: &'a [Cell], out: &mut Vec<&'a Environment>) {
            for c in cells {
                match c {
                    Cell::Section { cells, .. } => walk(cells, out),
                    Cell::Text(_) => {}
                    Cell::Env(e) => out.push(e),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.cells, &mut out);
        out
    }

    pub fn environment(&self, name: &str) -> Option<&Environment> {
        self.environments().into_iter().find(|e| e.name == name)
    }

    /// References to every formula in the document, in order.
    pub fn formula_refs(&self) -> Vec<FormulaRef> {
        self.environments()
            .into_iter()
            .flat_map(|env| {
                env.formulas
                    .iter()
                    .map(move |lf| FormulaRef::new(&self.id, &env.name, &lf.label))
            })
            .collect()
    }

    pub fn resolve(&self, r: &FormulaRef) -> Option<&Formula> {
        if r.document != self.id {
            return None;
        }
        self.environment(&r.environment)?
            .formulas
            .iter()
            .find(|lf| lf.label == r.label)
            .map(|lf| &lf.formula)
    }

    fn check_arities(&self) -> Result<(), DocumentError> {
        let mut seen: BTreeMap<(bool, String), usize> = BTreeMap::new();
        for env in self.environments() {
            for lf in &env.formulas {
                let symbols = lf
                    .formula
                    .functions()
                    .into_iter()
                    .map(|(f, n)| (false, f, n))
                    .chain(
                        lf.formula
                            .predicates()
                            .into_iter()
                            .map(|(p, n)| (true, p, n)),
                    );
                for (is_pred, name, arity) in symbols {
                    match seen.insert((is_pred, name.clone()), arity) {
                        Some(prev) if prev != arity => {
                            return Err(DocumentError::Format(format!(
                                "symbol {name} used with arities {prev} and {arity} ({}.{})",
                                env.name, lf.label
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }
}

fn convert_cells(
    raw: Vec<RawCell>,
    names: &mut BTreeSet<String>,
) -> Result<Vec<Cell>, DocumentError> {
    raw.into_iter()
        .map(|c| match c {
            RawCell::Section { title, cells } => Ok(Cell::Section {
                title,
                cells: convert_cells(cells, names)?,
            }),
            RawCell::Text { content } => Ok(Cell::Text(content)),
            RawCell::Env {
                kind,
                name,
                formulas,
            } => {
                if !names.insert(name.clone()) {
                    return Err(DocumentError::DuplicateEnvironment(name));
                }
                let mut labels = BTreeSet::new();
                let mut parsed = Vec::with_capacity(formulas.len());
                for RawFormula { label, formula } in formulas {
                    if !labels.insert(label.clone()) {
                        return Err(DocumentError::DuplicateLabel {
                            environment: name,
                            label,
                        });
                    }
                    let formula =
                        parse_formula(&formula).map_err(|source| DocumentError::Parse {
                            environment: name.clone(),
                            label: label.clone(),
                            source,
                        })?;
                    // The grammar only yields closed formulas; keep the check
                    // for documents built in code.
                    if !formula.is_closed() {
                        return Err(DocumentError::Format(format!(
                            "formula {name}.{label} has free variables"
                        )));
                    }
                    parsed.push(LabeledFormula { label, formula });
                }
                Ok(Cell::Env(Environment {
                    kind,
                    name,
                    formulas: parsed,
                }))
            }
        })
        .collect()
}

/// Reads a document from a byte stream.
pub fn load_document(source: impl Read) -> Result<Document, DocumentError> {
    Document::load(source)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutlineFormula {
    pub label: String,
    /// Full rendered formula, shown as a tooltip.
    pub formula: String,
}

/// Knowledge-browser view of a document: sections and environments only.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum OutlineNode {
    Section {
        title: String,
        children: Vec<OutlineNode>,
    },
    Env {
        kind: EnvKind,
        name: String,
        formulas: Vec<OutlineFormula>,
    },
}

/// Strips informal content from `doc`, keeping its sectional structure.
///
/// Sections that contain no environments are dropped.
pub fn outline(doc: &Document) -> Vec<OutlineNode> {
    fn walk(cells: &[Cell]) -> Vec<OutlineNode> {
        cells
            .iter()
            .filter_map(|c| match c {
                Cell::Text(_) => None,
                Cell::Section { title, cells } => {
                    let children = walk(cells);
                    (!children.is_empty()).then(|| OutlineNode::Section {
                        title: title.clone(),
                        children,
                    })
                }
                Cell::Env(env) => Some(OutlineNode::Env {
                    kind: env.kind,
                    name: env.name.clone(),
                    formulas: env
                        .formulas
                        .iter()
                        .map(|lf| OutlineFormula {
                            label: lf.label.clone(),
                            formula: render_formula(&lf.formula),
                        })
                        .collect(),
                }),
            })
            .collect()
    }
    walk(&doc.cells)
}

/// Collects exactly the selected formulas, in document order.
pub fn build_knowledge_base(
    docs: &[Document],
    selection: &BTreeSet<FormulaRef>,
) -> Result<KnowledgeBase, DocumentError> {
    for r in selection {
        if !docs.iter().any(|d| d.resolve(r).is_some()) {
            return Err(DocumentError::Resolve(r.clone()));
        }
    }
    let mut entries = Vec::new();
    for doc in docs {
        for env in doc.environments() {
            for lf in &env.formulas {
                let r = FormulaRef::new(&doc.id, &env.name, &lf.label);
                if selection.contains(&r) && !entries.iter().any(|e: &KbEntry| e.reference == r) {
                    entries.push(KbEntry {
                        display_label: r.display_label(),
                        reference: r,
                        formula: lf.formula.clone(),
                    });
                }
            }
        }
    }
    Ok(KnowledgeBase { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"id": "d", "title": "Minimal", "cells": [
        {"type": "env", "kind": "theorem", "name": "T", "formulas": [{"label": "1", "formula": "P -> P"}]}
    ]}"#;

    const NESTED: &str = r#"{"id": "n", "title": "Nested", "cells": [
        {"type": "text", "content": "intro"},
        {"type": "section", "title": "A", "cells": [
            {"type": "text", "content": "t"},
            {"type": "env", "kind": "axiom", "name": "Ax", "formulas": [
                {"label": "1", "formula": "forall x. P(x) -> Q(x)"},
                {"label": "2", "formula": "P(a)"}]},
            {"type": "section", "title": "A.1", "cells": [
                {"type": "env", "kind": "theorem", "name": "T", "formulas": [{"label": "1", "formula": "Q(a)"}]}
            ]}
        ]},
        {"type": "section", "title": "Informal", "cells": [{"type": "text", "content": "only prose"}]}
    ]}"#;

    #[test]
    fn loads_minimal_document() {
        let doc = load_document(MINIMAL.as_bytes()).unwrap();
        assert_eq!(doc.environments().len(), 1);
        assert_eq!(doc.environments()[0].formulas.len(), 1);
        assert_eq!(doc.environments()[0].kind, EnvKind::Theorem);
    }

    #[test]
    fn duplicate_label_rejected() {
        let src = r#"{"id": "d", "title": "", "cells": [
            {"type": "env", "kind": "theorem", "name": "T", "formulas": [
                {"label": "1", "formula": "P"}, {"label": "1", "formula": "Q"}]}]}"#;
        assert!(matches!(
            load_document(src.as_bytes()),
            Err(DocumentError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn parse_error_names_environment_and_label() {
        let src = r#"{"id": "d", "title": "", "cells": [
            {"type": "env", "kind": "lemma", "name": "L", "formulas": [{"label": "7", "formula": "P &"}]}]}"#;
        match load_document(src.as_bytes()) {
            Err(DocumentError::Parse {
                environment, label, ..
            }) => {
                assert_eq!(environment, "L");
                assert_eq!(label, "7");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_and_schema() {
        assert!(matches!(
            load_document("{".as_bytes()),
            Err(DocumentError::Format(_))
        ));
        let bad_kind = r#"{"id": "d", "title": "", "cells": [{"type": "env", "kind": "remark", "name": "R", "formulas": []}]}"#;
        assert!(matches!(
            load_document(bad_kind.as_bytes()),
            Err(DocumentError::Format(_))
        ));
        let dup_env = r#"{"id": "d", "title": "", "cells": [
            {"type": "env", "kind": "axiom", "name": "A", "formulas": []},
            {"type": "env", "kind": "axiom", "name": "A", "formulas": []}]}"#;
        assert!(matches!(
            load_document(dup_env.as_bytes()),
            Err(DocumentError::DuplicateEnvironment(_))
        ));
        let arity = r#"{"id": "d", "title": "", "cells": [
            {"type": "env", "kind": "axiom", "name": "A", "formulas": [{"label": "1", "formula": "P(a) & P(a, b)"}]}]}"#;
        assert!(matches!(
            load_document(arity.as_bytes()),
            Err(DocumentError::Format(_))
        ));
    }

    #[test]
    fn outline_drops_text() {
        let doc = load_document(NESTED.as_bytes()).unwrap();
        let out = outline(&doc);
        assert_eq!(out.len(), 1);
        match &out[0] {
            OutlineNode::Section { title, children } => {
                assert_eq!(title, "A");
                assert_eq!(children.len(), 2);
                assert!(matches!(&children[0], OutlineNode::Env { name, .. } if name == "Ax"));
                assert!(
                    matches!(&children[1], OutlineNode::Section { title, .. } if title == "A.1")
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        let json = serde_json::to_string(&out).unwrap();
        assert!(!json.contains("intro") && !json.contains("only prose"));
        assert!(json.contains("forall x. P(x) -> Q(x)"));
    }

    #[test]
    fn outline_of_informal_document_is_empty() {
        let src = r#"{"id": "d", "title": "", "cells": [{"type": "text", "content": "x"}]}"#;
        assert!(outline(&load_document(src.as_bytes()).unwrap()).is_empty());
    }

    #[test]
    fn knowledge_base_selection() {
        let doc = load_document(NESTED.as_bytes()).unwrap();
        let docs = [doc];
        assert!(build_knowledge_base(&docs, &BTreeSet::new())
            .unwrap()
            .is_empty());

        let sel = BTreeSet::from([FormulaRef::new("n", "T", "1")]);
        let kb = build_knowledge_base(&docs, &sel).unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(kb.entries[0].display_label, "T.1");

        let sel = BTreeSet::from([
            FormulaRef::new("n", "T", "1"),
            FormulaRef::new("n", "Ax", "2"),
        ]);
        let kb = build_knowledge_base(&docs, &sel).unwrap();
        let labels: Vec<_> = kb
            .entries
            .iter()
            .map(|e| e.display_label.as_str())
            .collect();
        assert_eq!(labels, ["Ax.2", "T.1"]);

        let missing = BTreeSet::from([FormulaRef::new("n", "T", "9")]);
        assert!(matches!(
            build_knowledge_base(&docs, &missing),
            Err(DocumentError::Resolve(_))
        ));
    }

    #[test]
    fn round_trip_through_json() {
        let doc = load_document(NESTED.as_bytes()).unwrap();
        let again = Document::from_json(&doc.to_json()).unwrap();
        assert_eq!(doc, again);
    }
}
