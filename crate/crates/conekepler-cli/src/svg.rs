//! A minimal standalone SVG writer for plane-coordinate curves.  The output
//! depends only on the input points and title, so repeated runs produce
//! identical bytes.

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

/// Render `points` as a polyline with coordinate axes and bound labels.
/// Non-finite points are skipped.  Panics only if `points` is empty.
pub fn polyline_plot(points: &[(f64, f64)], title: &str) -> String {
    let finite: Vec<(f64, f64)> =
        points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    assert!(!finite.is_empty(), "nothing to plot");

    let (mut x0, mut x1) = bounds(finite.iter().map(|p| p.0));
    let (mut y0, mut y1) = bounds(finite.iter().map(|p| p.1));
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);

    let span = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
    let py = |y: f64| SIZE - MARGIN - (y - y0) / (y1 - y0) * span;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(&format!(
        "  <title>{}</title>\n",
        title.replace('&', "&amp;").replace('<', "&lt;")
    ));
    s.push_str(&format!(
        "  <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{span}\" height=\"{span}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n"
    ));

    // Axes through the plane origin, when it is in view.
    if x0 < 0.0 && 0.0 < x1 {
        let x = px(0.0);
        s.push_str(&format!(
            "  <line x1=\"{x:.3}\" y1=\"{MARGIN}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
            SIZE - MARGIN
        ));
    }
    if y0 < 0.0 && 0.0 < y1 {
        let y = py(0.0);
        s.push_str(&format!(
            "  <line x1=\"{MARGIN}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
            SIZE - MARGIN
        ));
    }

    // Bound labels at the frame corners.
    s.push_str(&format!(
        "  <text x=\"{MARGIN}\" y=\"{:.3}\" font-size=\"12\" fill=\"#444\">p1 in [{x0:.6e}, {x1:.6e}]</text>\n",
        SIZE - MARGIN / 4.0
    ));
    s.push_str(&format!(
        "  <text x=\"8\" y=\"{:.3}\" font-size=\"12\" fill=\"#444\" transform=\"rotate(-90 8 {:.3})\">p2 in [{y0:.6e}, {y1:.6e}]</text>\n",
        SIZE - MARGIN,
        SIZE - MARGIN
    ));

    let coords: Vec<String> =
        finite.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
    s.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#0b62a4\" stroke-width=\"1.5\"/>\n",
        coords.join(" ")
    ));
    s.push_str("</svg>\n");
    s
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Widen a degenerate or tight range so the mapping to pixels is well
/// defined and the curve does not hug the frame.
fn pad(lo: &mut f64, hi: &mut f64) {
    let width = *hi - *lo;
    let pad = if width > 0.0 { 0.05 * width } else { 0.5 * lo.abs().max(1.0) };
    *lo -= pad;
    *hi += pad;
}
