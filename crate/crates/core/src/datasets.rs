//! Numeric data files and the bundled example data.
//!
//! Whitespace files hold any number of values per line; `#` starts a comment.
//! CSV files have a header row and one value is read per record, from a named
//! column or the first one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl DataSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(&v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositive { line: 0, value: v });
        }
        Ok(Self {
            label: label.into(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn parse_value(token: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("`{token}` is not a number"),
    })?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::NonPositive { line, value: v });
    }
    Ok(v)
}

/// Parses whitespace-separated values. Lines and columns in errors are
/// 1-based; the column counts characters.
pub fn parse_whitespace(label: &str, text: &str) -> Result<DataSet> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut rest = body;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
            let column = body[..offset + start].chars().count() + 1;
            values.push(parse_value(&tail[..len], i + 1, column)?);
            offset += start + len;
            rest = &tail[len..];
        }
    }
    DataSet::new(label, values)
}

/// Parses one column of a CSV file with a header row.
pub fn parse_csv(label: &str, text: &str, column: Option<&str>) -> Result<DataSet> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    let idx = match column {
        None => 0,
        Some(name) => headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("no column named `{name}`"),
        })?,
    };
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                line,
                column: 1,
                message: e.to_string(),
            }
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = rec.get(idx).ok_or_else(|| Error::Parse {
            line,
            column: idx + 1,
            message: "missing field".into(),
        })?;
        values.push(parse_value(field, line, idx + 1)?);
    }
    DataSet::new(label, values)
}

pub const JUTE_10MM: &str = include_str!("../data/jute_10mm.txt");
pub const JUTE_20MM: &str = include_str!("../data/jute_20mm.txt");
pub const SIMULATED_X: &str = include_str!("../data/simulated_x.txt");
pub const SIMULATED_Y: &str = include_str!("../data/simulated_y.txt");

/// Jute fiber breaking strengths at 10 mm gauge length (strength sample).
pub fn jute_10mm() -> DataSet {
    parse_whitespace("jute_10mm", JUTE_10MM).expect("bundled data parses")
}

/// Jute fiber breaking strengths at 20 mm gauge length (stress sample).
pub fn jute_20mm() -> DataSet {
    parse_whitespace("jute_20mm", JUTE_20MM).expect("bundled data parses")
}

/// Twenty draws from GLFR(1, 0.4, 1.5).
pub fn simulated_x() -> DataSet {
    parse_whitespace("simulated_x", SIMULATED_X).expect("bundled data parses")
}

/// Twenty draws from GLFR(1, 0.4, 1).
pub fn simulated_y() -> DataSet {
    parse_whitespace("simulated_y", SIMULATED_Y).expect("bundled data parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets() {
        let x = jute_10mm();
        assert_eq!(x.len(), 30);
        assert_eq!(x.values[0], 693.73);
        assert_eq!(x.values[29], 177.25);
        let y = jute_20mm();
        assert_eq!(y.len(), 30);
        assert_eq!(y.values[0], 71.46);
        assert_eq!(simulated_x().len(), 20);
        assert_eq!(simulated_y().values[19], 2.2203);
    }

    #[test]
    fn whitespace_errors_name_the_position() {
        let e = parse_whitespace("t", "# header\n1.0 2.0\n3.0  abc 4\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                column: 6,
                message: "`abc` is not a number".into()
            }
        );
        assert_eq!(parse_whitespace("t", "# only a comment\n\n"), Err(Error::EmptyData));
        assert_eq!(parse_whitespace("t", ""), Err(Error::EmptyData));
        assert!(matches!(
            parse_whitespace("t", "1 -2"),
            Err(Error::NonPositive { line: 1, .. })
        ));
        assert!(matches!(parse_whitespace("t", "1 0"), Err(Error::NonPositive { .. })));
        assert_eq!(
            parse_whitespace("t", "1\t2 # 3\n 4").unwrap().values,
            vec![1.0, 2.0, 4.0]
        );
    }

    #[test]
    fn csv_columns() {
        let text = "id,strength\n1,2.5\n2,3.5\n";
        assert_eq!(parse_csv("t", text, Some("strength")).unwrap().values, vec![2.5, 3.5]);
        assert_eq!(parse_csv("t", text, None).unwrap().values, vec![1.0, 2.0]);
        assert!(parse_csv("t", text, Some("nope")).is_err());
        let e = parse_csv("t", "v\n1\nx\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        assert_eq!(parse_csv("t", "v\n", None), Err(Error::EmptyData));
    }
}
