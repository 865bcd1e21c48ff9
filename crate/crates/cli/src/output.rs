use serde_json::{json, Map, Value};

use discord_core::channels::{Trajectory, TrajectoryRecord};
use discord_core::freezing::{FrozenInterval, ScanAxes, ScanRow};

pub const TRAJECTORY_HEADER: &str =
    "param,rho11,rho22,rho33,rho44,re14,im14,re23,im23,lam1sq,lam2sq,lam3sq,gmqd,frozen";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Ordered key/value report printed by `gmqd` and `freeze`.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.fields.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable report");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push(',');
            out.push_str(&csv_value(v));
            out.push('\n');
        }
        out
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => flag(*b).to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            _ => num(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_value).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string().replace(',', ";"),
    }
}

fn record_row(r: &TrajectoryRecord) -> String {
    let s = &r.state;
    let l = r.gmqd.lambda_sq;
    let cols = [
        r.param,
        s.rho11(),
        s.rho22(),
        s.rho33(),
        s.rho44(),
        s.rho14().re,
        s.rho14().im,
        s.rho23().re,
        s.rho23().im,
        l[0],
        l[1],
        l[2],
        r.gmqd.value,
    ];
    let mut row = cols.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",");
    row.push(',');
    row.push_str(flag(r.frozen));
    row
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::with_capacity(t.records.len() * 256);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &t.records {
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}

pub fn interval_json(i: &FrozenInterval) -> Value {
    json!({"start": i.start, "end": i.end, "level": i.level, "trivial": i.trivial})
}

pub fn trajectory_json(t: &Trajectory, intervals: &[FrozenInterval]) -> String {
    let records: Vec<Value> = t
        .records
        .iter()
        .map(|r| {
            let s = &r.state;
            json!({
                "param": r.param,
                "rho11": s.rho11(),
                "rho22": s.rho22(),
                "rho33": s.rho33(),
                "rho44": s.rho44(),
                "rho14": [s.rho14().re, s.rho14().im],
                "rho23": [s.rho23().re, s.rho23().im],
                "lambda_sq": r.gmqd.lambda_sq,
                "gmqd": r.gmqd.value,
                "frozen": r.frozen,
            })
        })
        .collect();
    let doc = json!({
        "metadata": t.metadata,
        "intervals": intervals.iter().map(interval_json).collect::<Vec<_>>(),
        "records": records,
    });
    let mut s = serde_json::to_string(&doc).expect("serializable trajectory");
    s.push('\n');
    s
}

pub fn scan_csv(axes: ScanAxes, rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(axes.header());
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            num(r.transverse),
            num(r.c3),
            flag(r.membership.physical),
            flag(r.membership.freezing)
        ));
    }
    out
}

pub fn scan_json(r: f64, s: f64, axes: ScanAxes, grid: usize, seed: u64, rows: &[ScanRow]) -> String {
    let transverse = match axes {
        ScanAxes::C2C3 => "c2",
        ScanAxes::C1C3 => "c1",
    };
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                transverse: row.transverse,
                "c3": row.c3,
                "physical": row.membership.physical,
                "freezing": row.membership.freezing,
            })
        })
        .collect();
    let doc = json!({"r": r, "s": s, "axes": axes, "grid": grid, "seed": seed, "rows": rows});
    let mut out = serde_json::to_string(&doc).expect("serializable scan");
    out.push('\n');
    out
}
