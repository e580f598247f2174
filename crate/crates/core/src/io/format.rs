//! JSON layout shared by the document and script writers.

use std::io;

use serde_json::ser::Formatter;

/// Indented objects, arrays on one line unless they hold objects.
#[derive(Debug, Default)]
pub struct CompactArrays {
    depth: usize,
    /// Per open container: is it an array, and did it hold an object.
    stack: Vec<(bool, bool)>,
}

impl CompactArrays {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.depth {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for CompactArrays {
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.stack.push((true, false));
        self.depth += 1;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        let (_, block) = self.stack.pop().unwrap_or_default();
        self.depth -= 1;
        if block {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b",")
        }
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(top) = self.stack.last_mut() {
            if top.0 {
                top.1 = true;
                self.newline(w)?;
            }
        }
        self.stack.push((false, false));
        self.depth += 1;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        let (_, has_keys) = self.stack.pop().unwrap_or_default();
        self.depth -= 1;
        if has_keys {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if let Some(top) = self.stack.last_mut() {
            top.1 = true;
        }
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }
}

/// Byte offset, line and column of a parse error.
pub fn parse_error_position(text: &str, err: &serde_json::Error) -> (usize, usize, usize) {
    let (line, column) = (err.line(), err.column());
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    let offset = if err.classify() == serde_json::error::Category::Eof {
        text.len()
    } else {
        (line_start + column.saturating_sub(1)).min(text.len())
    };
    (offset, line, column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[test]
    fn arrays_stay_on_one_line() {
        let value = serde_json::json!({"a": [1, 2, 3], "b": [{"c": [[0, 1]]}], "e": {}});
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactArrays::default());
        value.serialize(&mut ser).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "{\n  \"a\": [1,2,3],\n  \"b\": [\n    {\n      \"c\": [[0,1]]\n    }\n  ],\n  \"e\": {}\n}"
        );
    }

    #[test]
    fn offsets_count_bytes() {
        let text = "{\n  \"a\": tru";
        let err = serde_json::from_str::<serde_json::Value>(text).unwrap_err();
        let (offset, line, _) = parse_error_position(text, &err);
        assert_eq!(line, 2);
        assert_eq!(offset, text.len());
    }
}
