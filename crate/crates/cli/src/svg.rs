//! Static, self-contained SVG renderings of the visualization exports.
//! Styles are inline and numbers are printed with fixed precision so the
//! output is byte-stable.

use std::fmt::Write;

use voicemark::mlpipe::{pearson, CorrHeatmap, CurvePoint, Histogram, ScatterExport, ScatterMatrix, SwarmExport};

const FONT: &str = "font-family:sans-serif;font-size:11px";
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Coordinate with two decimals; negative zero prints as zero.
fn n(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Axis or tooltip label with four significant digits.
fn label(v: f64) -> String {
    if !v.is_finite() {
        return "NaN".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-3..6).contains(&mag) {
        format!("{v:.3e}")
    } else {
        let decimals = (3 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Area {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(values: impl IntoIterator<Item = f64>, r0: f64, r1: f64) -> Self {
        let (mut d0, mut d1) = values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if d0 > d1 {
            (d0, d1) = (0.0, 1.0);
        } else if d0 == d1 {
            d0 -= 0.5;
            d1 += 0.5;
        }
        Self { d0, d1, r0, r1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

struct Doc {
    body: String,
    width: f64,
    height: f64,
}

impl Doc {
    fn new(width: f64, height: f64, title: &str) -> Self {
        let mut d = Self {
            body: String::new(),
            width,
            height,
        };
        d.text(width / 2.0, 16.0, title, "middle", "font-size:13px;font-weight:bold");
        d
    }

    fn push(&mut self, s: String) {
        self.body.push_str(&s);
        self.body.push('\n');
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, extra: &str) {
        self.push(format!(
            r#"<text x="{}" y="{}" text-anchor="{anchor}" style="{FONT};{extra}">{}</text>"#,
            n(x),
            n(y),
            escape(s)
        ));
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str, anchor: &str) {
        self.push(format!(
            r#"<text x="0" y="0" text-anchor="{anchor}" transform="translate({},{}) rotate(-90)" style="{FONT}">{}</text>"#,
            n(x),
            n(y),
            escape(s)
        ));
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        self.push(format!(
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" style="{style}"/>"#,
            n(x1),
            n(y1),
            n(x2),
            n(y2)
        ));
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, style: &str, title: Option<&str>) {
        let t = title.map_or(String::new(), |t| format!("<title>{}</title>", escape(t)));
        self.push(format!(
            r#"<rect x="{}" y="{}" width="{}" height="{}" style="{style}">{t}</rect>"#,
            n(x),
            n(y),
            n(w.max(0.0)),
            n(h.max(0.0))
        ));
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, style: &str) {
        self.push(format!(r#"<circle cx="{}" cy="{}" r="{}" style="{style}"/>"#, n(x), n(y), n(r)));
    }

    /// Frame with min/max tick labels on both axes.
    fn axes(&mut self, a: Area, xs: &Scale, ys: &Scale, xlabel: &str, ylabel: &str) {
        let Area { x: x0, y: y0, w, h } = a;
        self.rect(x0, y0, w, h, "fill:none;stroke:#444;stroke-width:1", None);
        self.text(x0, y0 + h + 14.0, &label(xs.d0), "start", "");
        self.text(x0 + w, y0 + h + 14.0, &label(xs.d1), "end", "");
        self.text(x0 - 4.0, y0 + h, &label(ys.d0), "end", "");
        self.text(x0 - 4.0, y0 + 10.0, &label(ys.d1), "end", "");
        self.text(x0 + w / 2.0, y0 + h + 30.0, xlabel, "middle", "");
        self.vtext(x0 - 40.0, y0 + h / 2.0, ylabel, "middle");
    }

    fn finish(self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            n(self.width),
            n(self.height),
            n(self.width),
            n(self.height)
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{}" height="{}" style="fill:#ffffff"/>"#,
            n(self.width),
            n(self.height)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// Bars along x (`vertical = true`) or along y, filling the given box.
fn histogram_bars(doc: &mut Doc, h: &Histogram, axis: &Scale, area: Area, vertical: bool) {
    let Area { x: x0, y: y0, w, h: ht } = area;
    let max = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    for (i, &c) in h.counts.iter().enumerate() {
        let a = axis.at(h.edges[i]);
        let b = axis.at(h.edges[i + 1]);
        let tip = format!("[{}, {}]: {c}", label(h.edges[i]), label(h.edges[i + 1]));
        let style = "fill:#9ecae1;stroke:#3182bd;stroke-width:0.5";
        if vertical {
            let len = c as f64 / max * ht;
            doc.rect(a.min(b), y0 + ht - len, (b - a).abs(), len, style, Some(&tip));
        } else {
            let len = c as f64 / max * w;
            doc.rect(x0, a.min(b), len, (b - a).abs(), style, Some(&tip));
        }
    }
}

/// Scatter plot with marginal histograms and the least-squares line.
pub fn scatter_svg(s: &ScatterExport) -> String {
    let (x0, y0, w, h) = (70.0, 110.0, 300.0, 300.0);
    let mut doc = Doc::new(480.0, 460.0, &format!("{} vs {}", s.y_name, s.x_name));
    let xs = Scale::new(s.points.iter().map(|p| p.0).chain(s.x_hist.edges.iter().copied()), x0, x0 + w);
    let ys = Scale::new(s.points.iter().map(|p| p.1).chain(s.y_hist.edges.iter().copied()), y0 + h, y0);
    histogram_bars(&mut doc, &s.x_hist, &xs, Area { x: x0, y: 30.0, w, h: 70.0 }, true);
    histogram_bars(&mut doc, &s.y_hist, &ys, Area { x: x0 + w + 10.0, y: y0, w: 80.0, h }, false);
    doc.axes(Area { x: x0, y: y0, w, h }, &xs, &ys, &s.x_name, &s.y_name);
    for &(x, y) in &s.points {
        doc.circle(xs.at(x), ys.at(y), 3.0, "fill:#1f77b4;fill-opacity:0.7");
    }
    if s.slope.is_finite() && s.intercept.is_finite() {
        let (a, b) = (xs.d0, xs.d1);
        let clamp = |v: f64| v.clamp(y0, y0 + h);
        doc.line(
            xs.at(a),
            clamp(ys.at(s.intercept + s.slope * a)),
            xs.at(b),
            clamp(ys.at(s.intercept + s.slope * b)),
            "stroke:#d62728;stroke-width:1.5",
        );
        doc.text(
            x0 + w,
            y0 + h + 44.0,
            &format!("y = {} x + {}", label(s.slope), label(s.intercept)),
            "end",
            "fill:#d62728",
        );
    }
    doc.finish()
}

/// Diverging colour for a correlation in [-1, 1]; grey for NaN.
fn corr_colour(r: f64) -> String {
    if !r.is_finite() {
        return "#bbbbbb".into();
    }
    let r = r.clamp(-1.0, 1.0);
    let fade = |c: f64| (255.0 - (255.0 - c) * r.abs()).round() as u8;
    let (red, green, blue) = if r >= 0.0 {
        (fade(178.0), fade(24.0), fade(43.0))
    } else {
        (fade(33.0), fade(102.0), fade(172.0))
    };
    format!("#{red:02x}{green:02x}{blue:02x}")
}

pub fn heatmap_svg(hm: &CorrHeatmap) -> String {
    let k = hm.names.len() as f64;
    let cell = 24.0;
    let margin = 150.0;
    let mut doc = Doc::new(margin + k * cell + 20.0, margin + k * cell + 20.0, "Pearson correlation");
    for (i, name) in hm.names.iter().enumerate() {
        let c = margin + (i as f64 + 0.5) * cell;
        doc.text(margin - 4.0, c + 4.0, name, "end", "");
        doc.vtext(c + 4.0, margin - 4.0, name, "start");
    }
    for i in 0..hm.names.len() {
        for j in 0..hm.names.len() {
            let r = hm.matrix[(i, j)];
            let tip = format!("{} / {}: {}", hm.names[i], hm.names[j], label(r));
            doc.rect(
                margin + j as f64 * cell,
                margin + i as f64 * cell,
                cell,
                cell,
                &format!("fill:{};stroke:#ffffff;stroke-width:1", corr_colour(r)),
                Some(&tip),
            );
        }
    }
    doc.finish()
}

/// Mean cross-validated score against k with one-standard-deviation bars.
pub fn curve_svg(points: &[CurvePoint], metric: &str) -> String {
    let (x0, y0, w, h) = (70.0, 40.0, 380.0, 260.0);
    let mut doc = Doc::new(480.0, 350.0, &format!("Cross-validated {metric} by feature count"));
    let xs = Scale::new(points.iter().map(|p| p.k as f64), x0, x0 + w);
    let ys = Scale::new(
        points
            .iter()
            .flat_map(|p| [p.mean_score - p.std_score, p.mean_score + p.std_score]),
        y0 + h,
        y0,
    );
    doc.axes(Area { x: x0, y: y0, w, h }, &xs, &ys, "selected features (k)", metric);
    let finite: Vec<&CurvePoint> = points.iter().filter(|p| p.mean_score.is_finite()).collect();
    if finite.len() > 1 {
        let path: Vec<String> = finite
            .iter()
            .map(|p| format!("{},{}", n(xs.at(p.k as f64)), n(ys.at(p.mean_score))))
            .collect();
        doc.push(format!(
            r#"<polyline points="{}" style="fill:none;stroke:#1f77b4;stroke-width:1.5"/>"#,
            path.join(" ")
        ));
    }
    for p in finite {
        let x = xs.at(p.k as f64);
        if p.std_score.is_finite() && p.std_score > 0.0 {
            doc.line(
                x,
                ys.at(p.mean_score - p.std_score),
                x,
                ys.at(p.mean_score + p.std_score),
                "stroke:#1f77b4;stroke-width:1",
            );
        }
        doc.circle(x, ys.at(p.mean_score), 3.5, "fill:#1f77b4");
        doc.text(x, ys.at(p.mean_score) - 8.0, &label(p.mean_score), "middle", "fill:#555555");
    }
    doc.finish()
}

/// Z-scored values per feature, one colour per class, jittered within the
/// feature slot.
pub fn swarm_svg(s: &SwarmExport) -> String {
    let slot = 70.0;
    let (x0, y0, h) = (70.0, 40.0, 300.0);
    let w = slot * s.names.len().max(1) as f64;
    let mut doc = Doc::new(x0 + w + 140.0, y0 + h + 130.0, "Standardized values by class");
    let xs = Scale::new([0.0, s.names.len().max(1) as f64], x0, x0 + w);
    let ys = Scale::new(s.points.iter().map(|p| p.z), y0 + h, y0);
    doc.rect(x0, y0, w, h, "fill:none;stroke:#444;stroke-width:1", None);
    doc.text(x0 - 4.0, y0 + h, &label(ys.d0), "end", "");
    doc.text(x0 - 4.0, y0 + 10.0, &label(ys.d1), "end", "");
    doc.vtext(x0 - 40.0, y0 + h / 2.0, "z-score", "middle");
    if ys.d0 < 0.0 && ys.d1 > 0.0 {
        doc.line(x0, ys.at(0.0), x0 + w, ys.at(0.0), "stroke:#cccccc;stroke-dasharray:3,3");
    }
    let n_cls = s.classes.len().max(1) as f64;
    for (j, name) in s.names.iter().enumerate() {
        doc.vtext(xs.at(j as f64 + 0.5) + 4.0, y0 + h + 8.0, name, "end");
    }
    for p in &s.points {
        let ci = s.classes.iter().position(|&c| c == p.class).unwrap_or(0);
        let sub = (ci as f64 + 0.5 + p.offset) / n_cls;
        doc.circle(
            xs.at(p.feature as f64 + sub),
            ys.at(p.z),
            2.5,
            &format!("fill:{};fill-opacity:0.75", PALETTE[ci % PALETTE.len()]),
        );
    }
    for (ci, c) in s.classes.iter().enumerate() {
        let y = y0 + 10.0 + ci as f64 * 16.0;
        doc.circle(x0 + w + 20.0, y - 4.0, 4.0, &format!("fill:{}", PALETTE[ci % PALETTE.len()]));
        doc.text(x0 + w + 30.0, y, &format!("class {}", label(*c)), "start", "");
    }
    doc.finish()
}

/// Histograms on the diagonal, scatters below it and correlations above.
pub fn scatter_matrix_svg(m: &ScatterMatrix) -> String {
    let k = m.names.len();
    let cell = 110.0;
    let pad = 8.0;
    let margin = 30.0;
    let side = margin + k as f64 * cell + 20.0;
    let mut doc = Doc::new(side, side + 20.0, "Scatter matrix");
    let origin = |r: usize, c: usize| (margin + c as f64 * cell, margin + r as f64 * cell);
    for (i, h) in m.histograms.iter().enumerate() {
        let (x, y) = origin(i, i);
        doc.rect(x, y, cell, cell, "fill:none;stroke:#888;stroke-width:0.5", None);
        let xs = Scale::new(h.edges.iter().copied(), x + pad, x + cell - pad);
        let area = Area {
            x: x + pad,
            y: y + 20.0,
            w: cell - 2.0 * pad,
            h: cell - 20.0 - pad,
        };
        histogram_bars(&mut doc, h, &xs, area, true);
        doc.text(x + cell / 2.0, y + 13.0, &m.names[i], "middle", "font-size:9px");
    }
    for ((i, j), s) in &m.pairs {
        let (x, y) = origin(*j, *i);
        doc.rect(x, y, cell, cell, "fill:none;stroke:#888;stroke-width:0.5", None);
        let xs = Scale::new(s.points.iter().map(|p| p.0), x + pad, x + cell - pad);
        let ys = Scale::new(s.points.iter().map(|p| p.1), y + cell - pad, y + pad);
        for &(px, py) in &s.points {
            doc.circle(xs.at(px), ys.at(py), 1.8, "fill:#1f77b4;fill-opacity:0.6");
        }
        let (ux, uy) = origin(*i, *j);
        doc.rect(ux, uy, cell, cell, "fill:none;stroke:#888;stroke-width:0.5", None);
        let (a, b): (Vec<f64>, Vec<f64>) = s.points.iter().copied().unzip();
        let r = if a.len() > 1 { pearson(&a, &b) } else { f64::NAN };
        doc.rect(ux + 1.0, uy + 1.0, cell - 2.0, cell - 2.0, &format!("fill:{}", corr_colour(r)), None);
        doc.text(ux + cell / 2.0, uy + cell / 2.0 + 4.0, &format!("r = {}", label(r)), "middle", "");
    }
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape(r#"a<b>&"c'"#), "a&lt;b&gt;&amp;&quot;c&apos;");
    }

    #[test]
    fn number_formatting() {
        assert_eq!(n(-0.0001), "0.00");
        assert_eq!(n(1.005), "1.00");
        assert_eq!(label(0.25), "0.25");
        assert_eq!(label(1234.5678), "1235");
        assert_eq!(label(1e-7), "1.000e-7");
        assert_eq!(label(f64::NAN), "NaN");
        assert_eq!(label(1.0), "1");
    }

    #[test]
    fn degenerate_scale() {
        let s = Scale::new([2.0, 2.0], 0.0, 10.0);
        assert_eq!(s.at(2.0), 5.0);
        let s = Scale::new([f64::NAN], 0.0, 10.0);
        assert!(s.at(0.5).is_finite());
    }

    #[test]
    fn corr_colours() {
        assert_eq!(corr_colour(0.0), "#ffffff");
        assert_eq!(corr_colour(1.0), "#b2182b");
        assert_eq!(corr_colour(-1.0), "#2166ac");
        assert_eq!(corr_colour(f64::NAN), "#bbbbbb");
    }

    #[test]
    fn curve_is_self_contained() {
        let pts = vec![
            CurvePoint {
                k: 1,
                mean_score: 0.5,
                std_score: 0.1,
                fold_scores: vec![0.4, 0.6],
            },
            CurvePoint {
                k: 2,
                mean_score: 1.0,
                std_score: 0.0,
                fold_scores: vec![1.0, 1.0],
            },
        ];
        let svg = curve_svg(&pts, "accuracy");
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.ends_with("</svg>\n"));
        assert!(!svg.contains("href"));
        assert!(!svg.contains("<style"));
        assert_eq!(svg, curve_svg(&pts, "accuracy"));
    }
}
