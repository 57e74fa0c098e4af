use super::svg::{render_bar_chart, SvgStyle};
use crate::ArtifactStamp;

pub const DEFAULT_IMPORTANCE_THRESHOLD: f64 = 0.01;

/// Features whose normalized gain share exceeds `threshold`, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceReport {
    pub threshold: f64,
    pub entries: Vec<(String, f64)>,
}

impl ImportanceReport {
    /// Ties are broken by name so the order is total.
    pub fn new(importances: &[(String, f64)], threshold: f64) -> Self {
        let mut entries: Vec<(String, f64)> = importances.iter().filter(|(_, v)| *v > threshold).cloned().collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self { threshold, entries }
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("# gain share > {}\nfeature\tgain_share\n", self.threshold);
        if self.entries.is_empty() {
            s.push_str("# no feature above threshold\n");
        }
        for (name, v) in &self.entries {
            s.push_str(&format!("{name}\t{v:.6}\n"));
        }
        s
    }

    pub fn render_svg(&self, title: &str, style: &SvgStyle, stamp: &ArtifactStamp) -> String {
        render_bar_chart(&format!("{title} (gain share > {})", self.threshold), &self.entries, style, stamp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_and_order() {
        let imp = vec![("c".to_string(), 0.005), ("b".to_string(), 0.3), ("a".to_string(), 0.5)];
        let r = ImportanceReport::new(&imp, DEFAULT_IMPORTANCE_THRESHOLD);
        let names: Vec<&str> = r.entries.iter().map(|e| e.0.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn empty_has_notice() {
        let r = ImportanceReport::new(&[("a".to_string(), 0.001)], 0.01);
        assert!(r.entries.is_empty());
        assert!(r.to_tsv().contains("no feature above threshold"));
        assert!(r
            .render_svg("x", &SvgStyle::default(), &ArtifactStamp::unconfigured(0))
            .contains("no entries above threshold"));
    }
}
