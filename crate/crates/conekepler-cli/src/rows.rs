//! The trace-row table emitted by `sample` and `integrate`: one record per
//! parameter value, carrying the fictitious time, the physical time, the
//! point upstairs, the upper triangle of the point downstairs, and its two
//! plane coordinates.  Rows at parameters where the trajectory is undefined
//! carry an error message instead of data.

use crate::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub t: f64,
    /// The position upstairs, `n` entries.
    pub x_up: Vec<f64>,
    /// Row-major upper triangle of the downstairs point, `n(n+1)/2` entries.
    pub x_upper: Vec<f64>,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowBody {
    Data(RowData),
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub tau: f64,
    pub body: RowBody,
}

/// The exact CSV header for dimension `n`, also the JSON key order.
pub fn header(n: usize) -> String {
    let mut cols = vec!["tau".to_string(), "t".to_string()];
    for i in 0..n {
        cols.push(format!("X{i}"));
    }
    for i in 0..n {
        for j in i..n {
            cols.push(format!("x{i}{j}"));
        }
    }
    cols.push("p1".to_string());
    cols.push("p2".to_string());
    cols.join(",")
}

pub fn write_csv(n: usize, rows: &[TraceRow]) -> String {
    let mut out = header(n);
    out.push('\n');
    for row in rows {
        match &row.body {
            RowBody::Data(d) => {
                let mut fields = vec![fmt_f64(row.tau), fmt_f64(d.t)];
                fields.extend(d.x_up.iter().map(|&v| fmt_f64(v)));
                fields.extend(d.x_upper.iter().map(|&v| fmt_f64(v)));
                fields.push(fmt_f64(d.p1));
                fields.push(fmt_f64(d.p2));
                out.push_str(&fields.join(","));
            }
            RowBody::Error(msg) => {
                out.push_str(&fmt_f64(row.tau));
                out.push_str(",error=");
                out.push_str(msg);
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_json(n: usize, rows: &[TraceRow]) -> String {
    let keys: Vec<String> = header(n).split(',').map(str::to_string).collect();
    let mut out = String::from("[\n");
    for (r, row) in rows.iter().enumerate() {
        if r > 0 {
            out.push_str(",\n");
        }
        out.push_str("  {");
        match &row.body {
            RowBody::Data(d) => {
                let mut vals = vec![row.tau, d.t];
                vals.extend_from_slice(&d.x_up);
                vals.extend_from_slice(&d.x_upper);
                vals.push(d.p1);
                vals.push(d.p2);
                let fields: Vec<String> = keys
                    .iter()
                    .zip(&vals)
                    .map(|(k, &v)| format!("\"{k}\":{}", fmt_f64(v)))
                    .collect();
                out.push_str(&fields.join(","));
            }
            RowBody::Error(msg) => {
                out.push_str(&format!(
                    "\"tau\":{},\"error\":{}",
                    fmt_f64(row.tau),
                    serde_json::to_string(msg).expect("strings serialize"),
                ));
            }
        }
        out.push('}');
    }
    out.push_str("\n]\n");
    out
}

/// Parse a table previously produced by [`write_csv`].  Returns the
/// dimension together with the rows.
pub fn read_csv(text: &str) -> Result<(usize, Vec<TraceRow>), String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty table")?;
    let n = dimension_of(&head.split(',').map(str::to_string).collect::<Vec<_>>())?;
    let width = head.split(',').count();

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let tau: f64 = fields[0]
            .parse()
            .map_err(|e| format!("row {}: bad tau: {e}", lineno + 2))?;
        if fields.len() == 2 && fields[1].starts_with("error=") {
            rows.push(TraceRow {
                tau,
                body: RowBody::Error(fields[1]["error=".len()..].to_string()),
            });
            continue;
        }
        if fields.len() != width {
            return Err(format!("row {}: expected {} fields, got {}", lineno + 2, width, fields.len()));
        }
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse().map_err(|e| format!("row {}: {e}", lineno + 2)))
            .collect::<Result<_, String>>()?;
        rows.push(TraceRow { tau, body: body_from_numbers(n, &nums) });
    }
    Ok((n, rows))
}

/// Parse a table previously produced by [`write_json`].
pub fn read_json(text: &str) -> Result<(usize, Vec<TraceRow>), String> {
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let arr = doc.as_array().ok_or("expected a JSON array of rows")?;

    let mut n = None;
    for item in arr {
        let obj = item.as_object().ok_or("expected row objects")?;
        if !obj.contains_key("error") {
            let mut i = 0;
            while obj.contains_key(&format!("X{i}")) {
                i += 1;
            }
            n = Some(i);
            break;
        }
    }
    let n = n.ok_or("no data rows to infer the dimension from")?;
    let keys: Vec<String> = header(n).split(',').map(str::to_string).collect();

    let mut rows = Vec::new();
    for (r, item) in arr.iter().enumerate() {
        let obj = item.as_object().ok_or("expected row objects")?;
        let get = |key: &str| -> Result<f64, String> {
            obj.get(key)
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| format!("row {}: missing numeric \"{key}\"", r + 1))
        };
        let tau = get("tau")?;
        if let Some(err) = obj.get("error") {
            let msg = err.as_str().ok_or_else(|| format!("row {}: error must be a string", r + 1))?;
            rows.push(TraceRow { tau, body: RowBody::Error(msg.to_string()) });
            continue;
        }
        let nums: Vec<f64> =
            keys[1..].iter().map(|k| get(k)).collect::<Result<_, String>>()?;
        rows.push(TraceRow { tau, body: body_from_numbers(n, &nums) });
    }
    Ok((n, rows))
}

fn dimension_of(cols: &[String]) -> Result<usize, String> {
    let n = cols.iter().filter(|c| c.starts_with('X')).count();
    let expected = header(n);
    if cols.join(",") != expected {
        return Err(format!("unrecognized header; expected `{expected}`"));
    }
    Ok(n)
}

fn body_from_numbers(n: usize, nums: &[f64]) -> RowBody {
    let tri = n * (n + 1) / 2;
    RowBody::Data(RowData {
        t: nums[0],
        x_up: nums[1..1 + n].to_vec(),
        x_upper: nums[1 + n..1 + n + tri].to_vec(),
        p1: nums[1 + n + tri],
        p2: nums[2 + n + tri],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> (usize, Vec<TraceRow>) {
        let rows = vec![
            TraceRow {
                tau: 0.0,
                body: RowBody::Data(RowData {
                    t: 0.25,
                    x_up: vec![1.0, -2.0],
                    x_upper: vec![2.0, -4.0, 8.0],
                    p1: 1.0 / 3.0,
                    p2: -0.125,
                }),
            },
            TraceRow { tau: 0.5, body: RowBody::Error("collision".to_string()) },
            TraceRow {
                tau: 1.0,
                body: RowBody::Data(RowData {
                    t: std::f64::consts::PI,
                    x_up: vec![0.1, 0.2],
                    x_upper: vec![0.02, 0.04, 0.08],
                    p1: 0.0,
                    p2: -0.0,
                }),
            },
        ];
        (2, rows)
    }

    #[test]
    fn header_matches_the_contract() {
        assert_eq!(header(2), "tau,t,X0,X1,x00,x01,x11,p1,p2");
        assert_eq!(header(3), "tau,t,X0,X1,X2,x00,x01,x02,x11,x12,x22,p1,p2");
    }

    #[test]
    fn csv_round_trips_byte_for_byte() {
        let (n, rows) = sample_rows();
        let text = write_csv(n, &rows);
        let (m, back) = read_csv(&text).unwrap();
        assert_eq!(m, n);
        assert_eq!(back, rows);
        assert_eq!(write_csv(m, &back), text);
    }

    #[test]
    fn json_round_trips_byte_for_byte() {
        let (n, rows) = sample_rows();
        let text = write_json(n, &rows);
        let (m, back) = read_json(&text).unwrap();
        assert_eq!(m, n);
        assert_eq!(back, rows);
        assert_eq!(write_json(m, &back), text);
    }

    #[test]
    fn foreign_headers_are_rejected() {
        assert!(read_csv("tau,t,X0,X1,x00,x11,p1,p2\n").is_err());
        assert!(read_csv("").is_err());
    }
}
