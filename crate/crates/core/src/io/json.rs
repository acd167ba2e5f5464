//! Strict JSON reading with byte ranges kept for diagnostics.
//!
//! `serde_json` decides whether the text is well-formed JSON (and positions
//! syntax errors); `jsonc_parser`, with every extension disabled, then gives
//! an AST whose nodes carry byte ranges for semantic errors.

use std::collections::HashSet;

use jsonc_parser::ast::{Array, Object, Value};
use jsonc_parser::common::Range;
use jsonc_parser::{CollectOptions, ParseOptions};

use super::ParseError;

pub(crate) struct Source<'t> {
    text: &'t str,
    line_starts: Vec<usize>,
}

impl<'t> Source<'t> {
    pub fn from_bytes(bytes: &'t [u8]) -> Result<Source<'t>, ParseError> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Ok(Source::new(text)),
            Err(e) => {
                let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("prefix is valid");
                let src = Source::new(valid);
                let (line, column) = src.position(valid.len());
                Err(ParseError {
                    code: "SYNTAX".into(),
                    message: "input is not valid UTF-8".into(),
                    line,
                    column,
                    token: None,
                    row: None,
                })
            }
        }
    }

    pub fn new(text: &'t str) -> Source<'t> {
        let line_starts = std::iter::once(0)
            .chain(text.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        Source { text, line_starts }
    }

    /// 1-based line and column (in characters) of a byte offset.
    pub fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= offset);
        let start = self.line_starts[line - 1];
        let column = self.text[start..offset].chars().count() + 1;
        (line, column)
    }

    pub fn error(&self, code: &str, range: Range, message: impl Into<String>) -> ParseError {
        let (line, column) = self.position(range.start);
        let token = self
            .text
            .get(range.start..range.end)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let t: String = t.chars().take(40).collect();
                t
            });
        ParseError {
            code: code.to_string(),
            message: message.into(),
            line,
            column,
            token,
            row: None,
        }
    }

    pub fn syntax(&self, range: Range, message: impl Into<String>) -> ParseError {
        self.error("SYNTAX", range, message)
    }

    pub fn parse(&self) -> Result<Value<'t>, ParseError> {
        if let Err(e) = serde_json::from_str::<serde::de::IgnoredAny>(self.text) {
            return Err(ParseError {
                code: "SYNTAX".into(),
                message: strip_position(&e.to_string()),
                line: e.line().max(1),
                column: e.column().max(1),
                token: None,
                row: None,
            });
        }
        let options = ParseOptions {
            allow_comments: false,
            allow_loose_object_property_names: false,
            allow_trailing_commas: false,
            allow_missing_commas: false,
            allow_single_quoted_strings: false,
            allow_hexadecimal_numbers: false,
            allow_unary_plus_numbers: false,
            allow_bare_decimal_point_numbers: false,
            allow_non_finite_numbers: false,
            allow_extended_string_escapes: false,
        };
        let parsed = jsonc_parser::parse_to_ast(self.text, &CollectOptions::default(), &options).map_err(|e| {
            let (line, column) = (e.line_display(), e.column_display());
            ParseError {
                code: "SYNTAX".into(),
                message: e.kind().to_string(),
                line,
                column,
                token: None,
                row: None,
            }
        })?;
        parsed
            .value
            .ok_or_else(|| self.syntax(Range::new(0, 0), "empty document"))
    }

    pub fn object<'a>(&self, value: &'a Value<'t>, what: &str) -> Result<&'a Object<'t>, ParseError> {
        match value {
            Value::Object(o) => {
                let mut seen = HashSet::new();
                for p in &o.properties {
                    if !seen.insert(p.name.as_str()) {
                        return Err(self.syntax(p.range, format!("duplicate key `{}` in {what}", p.name.as_str())));
                    }
                }
                Ok(o)
            }
            other => Err(self.syntax(range_of(other), format!("{what} must be an object"))),
        }
    }

    pub fn array<'a>(&self, value: &'a Value<'t>, what: &str) -> Result<&'a Array<'t>, ParseError> {
        match value {
            Value::Array(a) => Ok(a),
            other => Err(self.syntax(range_of(other), format!("{what} must be an array"))),
        }
    }

    pub fn string(&self, value: &Value<'t>, what: &str) -> Result<String, ParseError> {
        match value {
            Value::StringLit(s) => Ok(s.value.to_string()),
            other => Err(self.syntax(range_of(other), format!("{what} must be a string"))),
        }
    }

    pub fn number(&self, value: &Value<'t>, what: &str) -> Result<f64, ParseError> {
        match value {
            Value::NumberLit(n) => n
                .value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.syntax(n.range, format!("{what} is not a finite number"))),
            other => Err(self.syntax(range_of(other), format!("{what} must be a number"))),
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn only_keys(&self, obj: &Object<'t>, allowed: &[&str], what: &str) -> Result<(), ParseError> {
        for p in &obj.properties {
            if !allowed.contains(&p.name.as_str()) {
                return Err(self.syntax(p.range, format!("unexpected key `{}` in {what}", p.name.as_str())));
            }
        }
        Ok(())
    }

    pub fn required<'a>(&self, obj: &'a Object<'t>, key: &str, what: &str) -> Result<&'a Value<'t>, ParseError> {
        obj.get(key)
            .map(|p| &p.value)
            .ok_or_else(|| self.syntax(Range::new(obj.range.start, obj.range.start + 1), format!("{what} is missing `{key}`")))
    }

    pub fn check_version(&self, root: &Object<'t>, expected: u32) -> Result<(), ParseError> {
        let v = self.required(root, "format_version", "document")?;
        let n = self.number(v, "format_version")?;
        if n != f64::from(expected) {
            return Err(self.syntax(range_of(v), format!("unsupported format_version {n}, expected {expected}")));
        }
        Ok(())
    }

    pub fn slice(&self, range: Range) -> &'t str {
        &self.text[range.start..range.end]
    }
}

pub(crate) fn range_of(value: &Value<'_>) -> Range {
    match value {
        Value::StringLit(v) => v.range,
        Value::NumberLit(v) => v.range,
        Value::BooleanLit(v) => v.range,
        Value::Object(v) => v.range,
        Value::Array(v) => v.range,
        Value::NullKeyword(v) => v.range,
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based_in_characters() {
        let src = Source::new("ab\nçd\n");
        assert_eq!(src.position(0), (1, 1));
        assert_eq!(src.position(3), (2, 1));
        assert_eq!(src.position(5), (2, 2)); // after the two-byte 'ç'
        assert_eq!(src.position(99), (3, 1));
    }

    #[test]
    fn empty_input_is_a_syntax_error_on_line_one() {
        let err = Source::new("").parse().unwrap_err();
        assert_eq!((err.code.as_str(), err.line), ("SYNTAX", 1));
        assert!(err.column >= 1);
    }

    #[test]
    fn lenient_json_is_rejected() {
        for text in ["{\"a\": 1,}", "// c\n{}", "{'a': 1}", "{\"a\": .5}", "{a: 1}", "[NaN]"] {
            assert!(Source::new(text).parse().is_err(), "{text}");
        }
    }

    #[test]
    fn invalid_utf8_is_positioned() {
        let err = Source::from_bytes(b"{\n  \"a\xff\": 1}").err().unwrap();
        assert_eq!((err.line, err.column), (2, 5));
    }
}
