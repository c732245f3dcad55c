//! Minimal SVG figures: stacked areas for frame series and a dendrogram.

use std::fmt::Write as _;

use framelens_core::clustering::Dendrogram;

const PALETTE: [&str; 15] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Stacked areas of `series` over `labels` (x positions), scaled so the
/// tallest stack fills the plot.
pub fn stacked_area(title: &str, labels: &[String], series: &[(String, Vec<f64>)]) -> String {
    let (w, h, left, top, plot_w, plot_h) = (960.0, 480.0, 60.0, 40.0, 640.0, 380.0);
    let n = labels.len();
    let mut totals = vec![0.0; n];
    for (_, ys) in series {
        for (t, y) in totals.iter_mut().zip(ys) {
            *t += y;
        }
    }
    let max = totals.iter().cloned().fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let x = |i: usize| left + if n > 1 { plot_w * i as f64 / (n - 1) as f64 } else { plot_w / 2.0 };
    let y = |v: f64| top + plot_h - plot_h * v / max;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="14">{}</text>"#, esc(title));
    let mut base = vec![0.0; n];
    for (k, (name, ys)) in series.iter().enumerate() {
        let upper: Vec<f64> = base.iter().zip(ys).map(|(b, v)| b + v).collect();
        let mut pts = String::new();
        for (i, &u) in upper.iter().enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", x(i), y(u));
        }
        for i in (0..n).rev() {
            let _ = write!(pts, "{:.2},{:.2} ", x(i), y(base[i]));
        }
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" stroke="none"><title>{}</title></polygon>"#, pts.trim_end(), esc(name));
        let ly = top + 14.0 * k as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, left + plot_w + 20.0, ly);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, left + plot_w + 35.0, ly + 9.0, esc(name));
        base = upper;
    }
    let _ = writeln!(s, r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, top + plot_h, left + plot_w, top + plot_h);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#, top + plot_h);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{max:.3}</text>"#, left - 4.0, top + 4.0);
    let step = (n / 12).max(1);
    for i in (0..n).step_by(step) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, x(i), top + plot_h + 16.0, esc(&labels[i]));
    }
    s.push_str("</svg>\n");
    s
}

pub fn dendrogram(d: &Dendrogram<f64>) -> String {
    let n = d.leaves();
    let (left, top, plot_w, plot_h) = (60.0, 30.0, 40.0 * n as f64, 300.0);
    let max = d.merges.iter().map(|m| m.height).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let order = d.leaf_order();
    let mut xs = vec![0.0; n + d.merges.len()];
    for (pos, &leaf) in order.iter().enumerate() {
        xs[leaf] = left + plot_w * (pos as f64 + 0.5) / n as f64;
    }
    let mut ys = vec![top + plot_h; n + d.merges.len()];
    let y = |v: f64| top + plot_h - plot_h * v / max;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">"#,
        left * 2.0 + plot_w,
        top + plot_h + 160.0
    );
    for (step, m) in d.merges.iter().enumerate() {
        let id = n + step;
        xs[id] = (xs[m.left] + xs[m.right]) / 2.0;
        ys[id] = y(m.height);
        let _ = writeln!(
            s,
            r#"<path d="M{:.2},{:.2} V{:.2} H{:.2} V{:.2}" fill="none" stroke="black"/>"#,
            xs[m.left], ys[m.left], ys[id], xs[m.right], ys[m.right]
        );
    }
    for &leaf in &order {
        let (lx, ly) = (xs[leaf], top + plot_h + 8.0);
        let _ = writeln!(
            s,
            r#"<text x="{lx:.2}" y="{ly:.2}" transform="rotate(60 {lx:.2} {ly:.2})">{}</text>"#,
            esc(&d.names[leaf])
        );
    }
    let _ = writeln!(s, r#"<text x="4" y="{}">{max:.3}</text>"#, top + 4.0);
    s.push_str("</svg>\n");
    s
}
