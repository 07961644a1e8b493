use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Representation,
    BiasIdentification,
    Eval,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Representation => "1",
            Stage::BiasIdentification => "2",
            Stage::Eval => "eval",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Stage::Representation),
            "2" => Some(Stage::BiasIdentification),
            "eval" => Some(Stage::Eval),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub round: usize,
    pub stage: Stage,
    pub epoch: usize,
    pub loss_rec: Option<f64>,
    pub loss_inv: Option<f64>,
    pub val_ndcg: Option<f64>,
    /// One entry per tracked attribute; empty on training rows.
    pub pred_bias: Vec<Option<f64>>,
}

/// Per-epoch losses and per-round validation metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub val_k: usize,
    pub attributes: Vec<String>,
    pub rows: Vec<HistoryRow>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl History {
    pub fn new(val_k: usize, attributes: Vec<String>) -> Self {
        Self {
            val_k,
            attributes,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: HistoryRow) {
        self.rows.push(row);
    }

    pub fn eval_rows(&self) -> impl Iterator<Item = &HistoryRow> {
        self.rows.iter().filter(|r| r.stage == Stage::Eval)
    }

    pub fn header(&self) -> String {
        let mut cols = vec![
            "round".to_string(),
            "stage".into(),
            "epoch".into(),
            "loss_rec".into(),
            "loss_inv".into(),
            format!("val_ndcg@{}", self.val_k),
        ];
        cols.extend(self.attributes.iter().map(|a| format!("pred_bias_{a}")));
        cols.join(",")
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let mut cols = vec![
                r.round.to_string(),
                r.stage.label().to_string(),
                r.epoch.to_string(),
                cell(r.loss_rec),
                cell(r.loss_inv),
                cell(r.val_ndcg),
            ];
            for k in 0..self.attributes.len() {
                cols.push(cell(r.pred_bias.get(k).copied().flatten()));
            }
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad(1, "empty history".into()))?.split(',').collect();
        if header.len() < 6 || header[..5] != ["round", "stage", "epoch", "loss_rec", "loss_inv"] {
            return Err(bad(1, "unexpected history header".into()));
        }
        let val_k = header[5]
            .strip_prefix("val_ndcg@")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| bad(1, format!("bad column {:?}", header[5])))?;
        let attributes: Vec<String> = header[6..]
            .iter()
            .map(|c| c.strip_prefix("pred_bias_").map(str::to_string).ok_or_else(|| bad(1, format!("bad column {c:?}"))))
            .collect::<Result<_>>()?;
        let mut history = History::new(val_k, attributes);
        for (n, line) in lines.enumerate() {
            let lineno = n + 2;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != header.len() {
                return Err(bad(lineno, format!("expected {} fields, got {}", header.len(), f.len())));
            }
            let num = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(lineno, format!("bad number {s:?}")))
                }
            };
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(lineno, format!("bad integer {s:?}")));
            let stage = Stage::parse(f[1]).ok_or_else(|| bad(lineno, format!("bad stage {:?}", f[1])))?;
            let pred_bias = if stage == Stage::Eval {
                f[6..].iter().map(|s| num(s)).collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            history.push(HistoryRow {
                round: int(f[0])?,
                stage,
                epoch: int(f[2])?,
                loss_rec: num(f[3])?,
                loss_inv: num(f[4])?,
                val_ndcg: num(f[5])?,
                pred_bias,
            });
        }
        Ok(history)
    }
}
