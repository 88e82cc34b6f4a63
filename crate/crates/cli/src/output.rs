use std::io::Write;

/// Fixed-width scientific notation so that reruns produce identical bytes.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.12e}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "-".into())
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Named series of `(x, y)` points, written as gnuplot data blocks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plot {
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

impl Plot {
    pub fn add(&mut self, label: impl Into<String>, points: Vec<(f64, f64)>) {
        self.series.push((label.into(), points));
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        for (i, (label, points)) in self.series.iter().enumerate() {
            if i > 0 {
                writeln!(w, "\n")?;
            }
            writeln!(w, "# {label}")?;
            for (x, y) in points {
                writeln!(w, "{} {}", num(*x), num(*y))?;
            }
        }
        Ok(())
    }
}

/// Result of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    pub plot: Plot,
    /// Human-readable descriptions of violated thresholds.
    pub violations: Vec<String>,
}

impl Report {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(1.5), "1.500000000000e0");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(opt(None), "-");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(
            String::from_utf8(t.to_csv().unwrap()).unwrap(),
            "a,b\n1,\"x,y\"\n"
        );
    }

    #[test]
    fn plot_blocks() {
        let mut p = Plot::default();
        p.add("one", vec![(1.0, 2.0)]);
        p.add("two", vec![(3.0, 4.0)]);
        let mut out = Vec::new();
        p.write(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("# one\n1.000000000000e0 2.000000000000e0\n\n\n# two\n"));
    }
}
