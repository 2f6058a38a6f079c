use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use prooftutor::corpus::Corpus;
use prooftutor::document::{build_knowledge_base, load_document, Document, DocumentError, FormulaRef, KnowledgeBase};
use prooftutor::formula::Formula;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("{path}: {source}")]
    Load {
        path: String,
        #[source]
        source: DocumentError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate document id \"{0}\"")]
    DuplicateId(String),
    #[error("no formula {0}")]
    Unresolved(FormulaRef),
    #[error("no formula {0} in any loaded document")]
    UnknownLabel(String),
    #[error("{0}")]
    Document(#[from] DocumentError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocumentSummary {
    pub id: String,
    pub title: String,
}

/// The documents a service or CLI run can prove from.
#[derive(Clone, Debug, Default)]
pub struct Library {
    documents: Vec<Document>,
}

impl Library {
    pub fn new(documents: Vec<Document>) -> Result<Self, LibraryError> {
        let mut seen = BTreeSet::new();
        for d in &documents {
            if !seen.insert(d.id.clone()) {
                return Err(LibraryError::DuplicateId(d.id.clone()));
            }
        }
        Ok(Self { documents })
    }

    /// The example documents shipped with the prover.
    pub fn bundled() -> Self {
        Self { documents: Corpus::bundled().documents }
    }

    pub fn load(paths: &[impl AsRef<Path>]) -> Result<Self, LibraryError> {
        let mut documents = Vec::new();
        for path in paths {
            let path = path.as_ref();
            let shown = path.display().to_string();
            let file = File::open(path).map_err(|source| LibraryError::Io { path: shown.clone(), source })?;
            documents.push(load_document(BufReader::new(file)).map_err(|source| LibraryError::Load { path: shown, source })?);
        }
        Self::new(documents)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn summaries(&self) -> Vec<DocumentSummary> {
        self.documents.iter().map(|d| DocumentSummary { id: d.id.clone(), title: d.title.clone() }).collect()
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn resolve(&self, r: &FormulaRef) -> Result<&Formula, LibraryError> {
        self.document(&r.document).and_then(|d| d.resolve(r)).ok_or_else(|| LibraryError::Unresolved(r.clone()))
    }

    /// Finds `Env.label`, looking in `preferred` first and then in load order.
    pub fn find_label(&self, label: &str, preferred: Option<&str>) -> Result<FormulaRef, LibraryError> {
        let (env, lab) = label.rsplit_once('.').ok_or_else(|| LibraryError::UnknownLabel(label.to_string()))?;
        let preferred = preferred.and_then(|id| self.document(id));
        preferred
            .into_iter()
            .chain(&self.documents)
            .map(|d| FormulaRef::new(&d.id, env, lab))
            .find(|r| self.resolve(r).is_ok())
            .ok_or_else(|| LibraryError::UnknownLabel(label.to_string()))
    }

    /// Every formula of the goal's document except the goal.
    pub fn auto_selection(&self, goal: &FormulaRef) -> BTreeSet<FormulaRef> {
        self.document(&goal.document).map_or_else(BTreeSet::new, |d| {
            d.formula_refs().into_iter().filter(|r| r != goal).collect()
        })
    }

    /// Resolves a prove request. The goal is left out of the knowledge base
    /// even when it is selected.
    pub fn prepare(&self, goal: &FormulaRef, selection: &BTreeSet<FormulaRef>) -> Result<Prepared, LibraryError> {
        let formula = self.resolve(goal)?.clone();
        for r in selection {
            self.resolve(r)?;
        }
        let selection: BTreeSet<FormulaRef> = selection.iter().filter(|r| *r != goal).cloned().collect();
        let kb = build_knowledge_base(&self.documents, &selection)?;
        Ok(Prepared { goal: formula, selection, kb })
    }
}

#[derive(Clone, Debug)]
pub struct Prepared {
    pub goal: Formula,
    /// The selection without the goal.
    pub selection: BTreeSet<FormulaRef>,
    pub kb: KnowledgeBase,
}
