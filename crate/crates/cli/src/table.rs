//! Column tables rendered as CSV with `#` metadata lines.

use std::fmt::Write as _;

/// Nine significant digits in scientific notation; `nan` for missing values.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        format!("{:.8e}", 0.0)
    } else {
        format!("{v:.8e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    key: Option<String>,
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
    comments: Vec<String>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            key: None,
            labels: Vec::new(),
            rows: Vec::new(),
            comments: Vec::new(),
        }
    }

    /// Adds a leading text column; rows must then be added with [`ResultTable::push_keyed`].
    pub fn keyed(mut self, name: impl Into<String>) -> Self {
        self.key = Some(name.into());
        self
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    /// Panics if the row width does not match the header or the table is keyed.
    pub fn push(&mut self, row: Vec<f64>) {
        assert!(self.key.is_none(), "keyed table needs push_keyed");
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn push_keyed(&mut self, label: impl Into<String>, row: Vec<f64>) {
        assert!(self.key.is_some(), "table has no key column");
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.labels.push(label.into());
        self.rows.push(row);
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn annotate(&mut self, key: impl std::fmt::Display, value: impl std::fmt::Display) {
        self.comments.push(format!("{key} = {value}"));
    }

    /// Moves `lines` ahead of the existing comments.
    pub fn prepend_comments(&mut self, lines: Vec<String>) {
        let rest = std::mem::replace(&mut self.comments, lines);
        self.comments.extend(rest);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let header: Vec<&str> = self.key.iter().chain(&self.columns).map(String::as_str).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (k, row) in self.rows.iter().enumerate() {
            let mut cells: Vec<String> = self.labels.get(k).cloned().into_iter().collect();
            cells.extend(row.iter().copied().map(format_value));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
