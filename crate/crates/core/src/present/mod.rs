//! Natural-language rendering and export of proof trees.

mod export;
mod prose;
mod view;

pub use export::{export_proof, ExportError, ExportFormat, ProofExport, UnsupportedFormat};
pub use prose::{
    render_proof_nl, template_keys, NotSimplified, Premise, ProseBlock, ProseBranch, ProseDocument,
};
pub use view::{tree_to_view, NodeKind, TreeView, ViewNode};
