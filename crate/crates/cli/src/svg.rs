//! Scatter frames of a planar cloud, one fixed scale across frames.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// One color per KL band, low to high.
pub const PALETTE: [&str; 8] = [
    "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725",
];

pub struct Frame {
    lo: [f64; 2],
    scale: f64,
}

impl Frame {
    /// Square window around every point of every frame.
    pub fn enclosing(frames: &[Vec<[f64; 2]>]) -> Frame {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in frames.iter().flatten() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        Frame {
            lo: [mid[0] - span / 2.0, mid[1] - span / 2.0],
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.lo[0]) * self.scale,
            SIZE - MARGIN - (p[1] - self.lo[1]) * self.scale,
        )
    }

    pub fn render(&self, points: &[[f64; 2]], bands: &[usize], title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="16" font-family="monospace" font-size="12">{title}</text>"#
        );
        for (p, &b) in points.iter().zip(bands) {
            let (x, y) = self.map(*p);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{}"/>"#,
                PALETTE[b.min(7)]
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
