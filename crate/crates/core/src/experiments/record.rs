use crate::error::{Error, Result};

/// A single cell of a sweep record.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
    /// Not applicable for this row (e.g. the first delta of a convergence ladder).
    Null,
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Real)
    }
}

/// One row of experiment output: named inputs followed by named outputs.
///
/// Records of one sweep share their column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub experiment: String,
    pub index: usize,
    pub fields: Vec<(String, Value)>,
}

impl SweepRecord {
    pub fn new(experiment: &str, index: usize) -> Self {
        Self {
            experiment: experiment.to_string(),
            index,
            fields: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.fields.push((name.to_string(), value.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(Value::as_real)
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.get(name) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    pub(crate) fn ensure_finite(self) -> Result<Self> {
        for (name, value) in &self.fields {
            if let Value::Real(x) = value {
                if !x.is_finite() {
                    return Err(Error::InvalidState(format!(
                        "{} row {}: non-finite {name} = {x}",
                        self.experiment, self.index
                    )));
                }
            }
        }
        Ok(self)
    }
}

/// `E_N(u_n, ū_m)` for `n, m ∈ 1..=size`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    /// Description of the input state, e.g. `tms(s=0.75,theta=3.14159)`.
    pub initial: String,
    size: usize,
    values: Vec<f64>,
}

impl HeatmapGrid {
    pub(crate) fn from_rows(initial: String, rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: rows.iter().map(Vec::len).find(|&l| l != size).unwrap_or(0),
            });
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidState("heatmap entries must be finite and >= 0".into()));
        }
        Ok(Self {
            initial,
            size,
            values,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry for left mode `n` and right mode `m` (1-based).
    pub fn get(&self, n: usize, m: usize) -> f64 {
        assert!(n >= 1 && m >= 1 && n <= self.size && m <= self.size);
        self.values[(n - 1) * self.size + (m - 1)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.size.max(1))
    }

    /// Largest `|E(n,m) − E(m,n)|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 1..=self.size {
            for m in 1..n {
                worst = worst.max((self.get(n, m) - self.get(m, n)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_lookup() {
        let r = SweepRecord::new("fig2", 3)
            .with("phi", 0.5)
            .with("n", 2usize)
            .with("family", "thermal")
            .with("delta", None::<f64>);
        assert_eq!(r.real("phi"), Some(0.5));
        assert_eq!(r.real("n"), Some(2.0));
        assert_eq!(r.text("family"), Some("thermal"));
        assert_eq!(r.get("delta"), Some(&Value::Null));
        assert_eq!(r.columns().collect::<Vec<_>>(), ["phi", "n", "family", "delta"]);
        assert!(r.clone().ensure_finite().is_ok());
        assert!(r.with("bad", f64::NAN).ensure_finite().is_err());
    }

    #[test]
    fn heatmap_shape_and_symmetry() {
        let g = HeatmapGrid::from_rows("x".into(), vec![vec![1.0, 0.5], vec![0.25, 0.0]]).unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.get(1, 2), 0.5);
        assert_eq!(g.get(2, 1), 0.25);
        assert_eq!(g.asymmetry(), 0.25);
        assert!(HeatmapGrid::from_rows("x".into(), vec![vec![1.0], vec![0.0]]).is_err());
        assert!(HeatmapGrid::from_rows("x".into(), vec![vec![-1.0]]).is_err());
    }
}
