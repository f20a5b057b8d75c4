use std::fmt::Write;

use super::{EdgeKind, MpiCfg};

/// Renders the graph as a GraphViz digraph. Output depends only on the graph.
pub fn emit_dot(cfg: &MpiCfg) -> String {
    let mut out = String::new();
    out.push_str("digraph mpicfg {\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for block in &cfg.blocks {
        let lines = match (block.first_line(), block.last_line()) {
            (Some(first), Some(last)) => format!("{first}..{last}"),
            _ => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "  B{id} [label=\"B{id}\\n{kind}\\n{lines}\"];",
            id = block.id,
            kind = block.kind.name(),
        );
    }
    for edge in &cfg.edges {
        let mut attrs = Vec::new();
        match edge.kind {
            EdgeKind::Sequential => attrs.push("style=solid".to_string()),
            EdgeKind::ParallelFanOut | EdgeKind::ParallelFanIn => attrs.push("style=dashed".to_string()),
            EdgeKind::Synchronization => {
                attrs.push("style=dotted".to_string());
                if let Some(info) = &edge.sync {
                    attrs.push(format!("label=\"{}\"", info.var));
                }
            }
        }
        if let Some(branch) = edge.branch {
            attrs.push(format!("label=\"{}\"", branch.name()));
        }
        let _ = writeln!(out, "  B{} -> B{} [{}];", edge.from, edge.to, attrs.join(", "));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::build_cfg;
    use crate::classify::classify_statements;
    use crate::frontend::{parse_source, SourceProgram};

    fn dot(text: &str) -> String {
        let ast = parse_source(&SourceProgram::from_text("t.mmpi", text)).unwrap();
        emit_dot(&build_cfg(&classify_statements(&ast).unwrap()).0)
    }

    #[test]
    fn empty_program() {
        let d = dot("");
        assert_eq!(
            d,
            "digraph mpicfg {\n  node [shape=box, fontname=\"monospace\"];\n  B0 [label=\"B0\\nentry\\n-\"];\n  B1 [label=\"B1\\nexit\\n-\"];\n  B0 -> B1 [style=solid];\n}\n"
        );
    }

    #[test]
    fn header_and_braces() {
        let d = dot("a = 1\nif a < 1 then\nb = 1\nendif\n");
        assert_eq!(d.matches("digraph").count(), 1);
        assert_eq!(d.matches('{').count(), d.matches('}').count());
        assert!(d.contains("label=\"then\""));
        assert!(d.contains("B1 [label=\"B1\\nordinary\\n1..2\"]"));
    }
}
