//! Edit scripts: a JSON array of `{op, mirror}` records.

use serde::Serialize;
use thiserror::Error;

use super::format::{parse_error_position, CompactArrays};
use crate::edit::ScriptRecord;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("script parse error at byte {offset} (line {line}, column {column}): {message}")]
pub struct ScriptError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptRecord>, ScriptError> {
    serde_json::from_str(text).map_err(|e| {
        let (offset, line, column) = parse_error_position(text, &e);
        ScriptError {
            offset,
            line,
            column,
            message: e.to_string(),
        }
    })
}

pub fn save_script(records: &[ScriptRecord]) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactArrays::default());
    records.serialize(&mut ser).expect("script serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::{BoundaryRef, EditOp};

    #[test]
    fn round_trip() {
        let records = vec![ScriptRecord {
            op: EditOp::Shorten {
                boundary: BoundaryRef { pick: [0.0, 1.5, -2.0] },
                distance: 3.0,
            },
            mirror: true,
        }];
        let text = save_script(&records);
        assert_eq!(parse_script(&text).unwrap(), records);
        assert!(parse_script("[]").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_script("[{\"op\": {\"kind\": \"twist\"}}]").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.offset > 0);
    }
}
