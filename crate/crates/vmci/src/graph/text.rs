//! Plain-text graph format shared by the CLI for ground-truth input and
//! discovery output:
//!
//! ```text
//! vars: A,B,C
//! A -> B
//! B -- C
//! ```
//!
//! One edge per line after a `vars:` header; `->` marks a directed edge,
//! `--` an undirected one. Blank lines and `#` comments are ignored.

use super::{Dag, Pdag};
use crate::error::{Error, Result};

impl Pdag {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("vars: ");
        out.push_str(&self.vertex_names().join(","));
        out.push('\n');
        for (a, b) in self.directed_edges() {
            out.push_str(&format!(
                "{} -> {}\n",
                self.vertex_names()[a],
                self.vertex_names()[b]
            ));
        }
        for (a, b) in self.undirected_edges() {
            out.push_str(&format!(
                "{} -- {}\n",
                self.vertex_names()[a],
                self.vertex_names()[b]
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Pdag> {
        let mut names: Option<Vec<String>> = None;
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vars:") {
                if names.is_some() {
                    return Err(Error::GraphParse(format!(
                        "line {}: repeated vars header",
                        lineno + 1
                    )));
                }
                let vs: Vec<String> = rest
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if vs.is_empty() {
                    return Err(Error::GraphParse(format!(
                        "line {}: empty vars header",
                        lineno + 1
                    )));
                }
                names = Some(vs);
                continue;
            }
            let names_ref = names.as_ref().ok_or_else(|| {
                Error::GraphParse(format!("line {}: edge before vars header", lineno + 1))
            })?;
            let lookup = |tok: &str| -> Result<usize> {
                names_ref
                    .iter()
                    .position(|n| n == tok)
                    .ok_or_else(|| Error::UnknownVertex(tok.to_string()))
            };
            if let Some((a, b)) = line.split_once("->") {
                directed.push((lookup(a.trim())?, lookup(b.trim())?));
            } else if let Some((a, b)) = line.split_once("--") {
                undirected.push((lookup(a.trim())?, lookup(b.trim())?));
            } else {
                return Err(Error::GraphParse(format!(
                    "line {}: expected `A -> B` or `A -- B`, got `{line}`",
                    lineno + 1
                )));
            }
        }
        let names = names.ok_or_else(|| Error::GraphParse("missing vars header".into()))?;
        Pdag::new_indexed(names, &directed, &undirected)
    }
}

impl Dag {
    /// Parse the text format, requiring every edge to be directed.
    pub fn from_text(text: &str) -> Result<Dag> {
        Pdag::from_text(text)?.to_dag()
    }

    pub fn to_text(&self) -> String {
        let directed = self.edges();
        Pdag::new_indexed(self.vertex_names().to_vec(), &directed, &[])
            .expect("a DAG is a consistent PDAG")
            .to_text()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = Pdag::new_indexed(
            vec!["A".into(), "B".into(), "C".into()],
            &[(0, 1)],
            &[(1, 2)],
        )
        .unwrap();
        let text = p.to_text();
        let back = Pdag::from_text(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn parses_comments_and_blanks() {
        let text = "# truth graph\nvars: X1, X2, X3\n\nX1 -> X3\n  X2 -- X3  \n";
        let p = Pdag::from_text(text).unwrap();
        assert!(p.has_directed(0, 2));
        assert!(p.has_undirected(1, 2));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Pdag::from_text("A -> B\n").is_err());
        assert!(Pdag::from_text("vars: A,B\nA => B\n").is_err());
        assert!(Pdag::from_text("vars: A,B\nA -> C\n").is_err());
        assert!(Pdag::from_text("").is_err());
    }

    #[test]
    fn dag_parse_rejects_undirected() {
        assert!(Dag::from_text("vars: A,B\nA -- B\n").is_err());
        let g = Dag::from_text("vars: A,B\nA -> B\n").unwrap();
        assert_eq!(g.n(), 2);
    }
}
