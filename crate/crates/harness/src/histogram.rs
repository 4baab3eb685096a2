use dcc_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub label: String,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width bins over `[lo, hi]`, each left-closed and right-open except
/// the last, which is closed. Values outside the range are dropped.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bins < 1 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::BadRange { lo, hi });
    }
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0; bins];
    for &v in values {
        if !(lo..=hi).contains(&v) {
            continue;
        }
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram {
        label: String::new(),
        edges,
        counts,
    })
}

impl Histogram {
    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries() {
        let h = histogram(&[0.0, 0.0, 0.0], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![3, 0, 0, 0]);
        let h = histogram(&[1.0], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![0, 0, 0, 1]);
        let h = histogram(&[0.25], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![0, 1, 0, 0]);
    }

    #[test]
    fn uniform_grid() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let h = histogram(&v, 10, 0.0, 1.0).unwrap();
        assert!(h.counts.iter().all(|&c| c == 10));
    }

    #[test]
    fn bad_range() {
        assert!(histogram(&[], 3, 1.0, 1.0).is_err());
        assert!(histogram(&[], 0, 0.0, 1.0).is_err());
    }
}
