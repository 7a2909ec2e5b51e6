//! SVG rendering of scanpath overlays: numbered fixations joined by arrowed
//! saccade lines.

use gazetk::Scanpath;

/// Presentation knobs for the overlay.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub stroke_width: f64,
    pub point_radius: f64,
    pub path_color: String,
    pub point_color: String,
    pub label_color: String,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 800,
            height: 600,
            stroke_width: 2.0,
            point_radius: 10.0,
            path_color: "#d62728".to_string(),
            point_color: "#1f77b4".to_string(),
            label_color: "#ffffff".to_string(),
        }
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Builds the SVG document. Fixations are numbered from 1 in scanpath
/// order; each saccade is a line with an arrowhead at its end.
pub fn scanpath_svg(scanpath: &Scanpath, spec: &RenderSpec, title: &str) -> String {
    let w = spec.width as f64;
    let h = spec.height as f64;
    let px = |x: f64| x * w;
    let py = |y: f64| y * h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    svg.push_str(&format!(
        "  <title>{}</title>\n  <defs>\n    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\n      <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"{}\"/>\n    </marker>\n  </defs>\n",
        esc(title),
        spec.path_color
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#f5f5f5\"/>\n",
        spec.width, spec.height
    ));

    for pair in scanpath.fixations.windows(2) {
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"{}\" marker-end=\"url(#arrow)\"/>\n",
            px(pair[0].x),
            py(pair[0].y),
            px(pair[1].x),
            py(pair[1].y),
            spec.path_color,
            spec.stroke_width
        ));
    }

    for (i, f) in scanpath.fixations.iter().enumerate() {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{}\" fill=\"{}\" fill-opacity=\"0.85\"/>\n",
            px(f.x),
            py(f.y),
            spec.point_radius,
            spec.point_color
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>\n",
            px(f.x),
            py(f.y),
            spec.point_radius,
            spec.label_color,
            i + 1
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
