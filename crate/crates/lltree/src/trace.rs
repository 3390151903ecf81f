//! Operation traces: a line-oriented format for replayable
//! insert/delete/query sequences.
//!
//! Lines are `I <id>`, `D <id>` or `Q <id>`; blank lines and `#`
//! comments are ignored.

use crate::error::Error;
use crate::universe::ElementId;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Insert(ElementId),
    Delete(ElementId),
    Query(ElementId),
}

pub fn parse_ops(text: &str) -> Result<Vec<Op>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let kind = it.next().unwrap();
        let id: ElementId = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::InvalidUniverse(format!("bad op on line {}", lineno + 1)))?;
        out.push(match kind {
            "I" => Op::Insert(id),
            "D" => Op::Delete(id),
            "Q" => Op::Query(id),
            other => {
                return Err(Error::InvalidUniverse(format!(
                    "unknown op {other:?} on line {}",
                    lineno + 1
                )))
            }
        });
    }
    Ok(out)
}

pub fn render_ops(ops: &[Op]) -> String {
    let mut out = String::new();
    for op in ops {
        match op {
            Op::Insert(id) => out.push_str(&format!("I {id}\n")),
            Op::Delete(id) => out.push_str(&format!("D {id}\n")),
            Op::Query(id) => out.push_str(&format!("Q {id}\n")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let ops = vec![Op::Insert(3), Op::Query(7), Op::Delete(3)];
        let text = render_ops(&ops);
        assert_eq!(parse_ops(&text).unwrap(), ops);
    }

    #[test]
    fn comments_and_errors() {
        assert_eq!(
            parse_ops("# header\n\nI 4\n").unwrap(),
            vec![Op::Insert(4)]
        );
        assert!(parse_ops("X 4\n").is_err());
        assert!(parse_ops("I\n").is_err());
    }
}
