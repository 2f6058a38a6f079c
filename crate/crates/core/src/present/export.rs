use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prose::{render_proof_nl, NotSimplified, ProseBlock, ProseDocument};
use super::view::{tree_to_view, TreeView};
use crate::document::KnowledgeBase;
use crate::search::ProofTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Text,
    Html,
    Json,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unsupported export format \"{0}\"")]
pub struct UnsupportedFormat(pub String);

impl FromStr for ExportFormat {
    type Err = UnsupportedFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ExportFormat::Text),
            "html" => Ok(ExportFormat::Html),
            "json" => Ok(ExportFormat::Json),
            other => Err(UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Text => "text",
            ExportFormat::Html => "html",
            ExportFormat::Json => "json",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error(transparent)]
    UnsupportedFormat(#[from] UnsupportedFormat),
    #[error(transparent)]
    NotSimplified(#[from] NotSimplified),
}

/// The JSON export: the tree view, plus prose when the tree is simplified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofExport {
    pub tree: TreeView,
    pub prose: Option<ProseDocument>,
}

/// Serializes a proof. Text and HTML need a simplified tree; JSON accepts any
/// tree.
pub fn export_proof(
    tree: &ProofTree,
    kb: &KnowledgeBase,
    format: ExportFormat,
) -> Result<Vec<u8>, ExportError> {
    Ok(match format {
        ExportFormat::Text => to_text(&render_proof_nl(tree, kb)?).into_bytes(),
        ExportFormat::Html => to_html(&render_proof_nl(tree, kb)?).into_bytes(),
        ExportFormat::Json => {
            let export = ProofExport {
                tree: tree_to_view(tree),
                prose: render_proof_nl(tree, kb).ok(),
            };
            serde_json::to_vec_pretty(&export).expect("exports serialize")
        }
    })
}

fn to_text(doc: &ProseDocument) -> String {
    fn blocks(list: &[ProseBlock], depth: usize, out: &mut String) {
        let indent = "  ".repeat(depth);
        for b in list {
            let _ = writeln!(out, "{indent}{}", b.text);
            for branch in &b.branches {
                let _ = writeln!(out, "{indent}  {}", branch.heading);
                blocks(&branch.blocks, depth + 2, out);
            }
        }
    }
    let mut out = format!("{}\n", doc.title());
    blocks(&doc.blocks, 0, &mut out);
    out
}

fn to_html(doc: &ProseDocument) -> String {
    fn blocks(list: &[ProseBlock], out: &mut String) {
        for b in list {
            let _ = write!(
                out,
                "<div class=\"situation\" data-node-id=\"{}\">",
                b.situation_id
            );
            let _ = write!(
                out,
                "<p class=\"step\" data-node-id=\"{}\" title=\"{}\">{}</p>",
                b.application_id,
                b.rule.display_name(),
                escape(&b.text)
            );
            for branch in &b.branches {
                let _ = write!(
                    out,
                    "<section class=\"branch\"><h3>{}</h3>",
                    escape(&branch.heading)
                );
                blocks(&branch.blocks, out);
                out.push_str("</section>");
            }
            out.push_str("</div>\n");
        }
    }
    let mut out = format!(
        "<article class=\"proof\">\n<h2>{}</h2>\n",
        escape(&doc.title())
    );
    blocks(&doc.blocks, &mut out);
    out.push_str("</article>\n");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}
