//! Pattern export as SVG paths, one user unit per centimeter.

use std::fmt::Write;

use nalgebra::{Point2, Vector2};

use super::document::round9;
use crate::geometry::Panel;

/// Horizontal gap (cm) between consecutive panels.
pub const PANEL_GAP: f64 = 2.0;

/// Margin (cm) around the laid-out panels in the view box.
const MARGIN: f64 = 1.0;

fn bbox(points: impl Iterator<Item = Point2<f64>>) -> Option<(Point2<f64>, Point2<f64>)> {
    points.fold(None, |acc, p| match acc {
        None => Some((p, p)),
        Some((lo, hi)) => Some((lo.inf(&p), hi.sup(&p))),
    })
}

fn panel_bbox(panel: &Panel, original: Option<&Panel>) -> (Point2<f64>, Point2<f64>) {
    let pts = panel.vertices.iter().chain(original.into_iter().flat_map(|o| o.vertices.iter()));
    bbox(pts.copied()).unwrap_or((Point2::origin(), Point2::origin()))
}

/// Translation of each panel: left to right, bottoms at `y = 0`, separated
/// by `PANEL_GAP`. Originals share their panel's translation.
pub fn pattern_layout(panels: &[Panel], originals: Option<&[Panel]>) -> Vec<Vector2<f64>> {
    let mut cursor = 0.0;
    let mut out = Vec::with_capacity(panels.len());
    for (i, panel) in panels.iter().enumerate() {
        let (lo, hi) = panel_bbox(panel, originals.and_then(|o| o.get(i)));
        out.push(Vector2::new(cursor - lo.x, -lo.y));
        cursor += hi.x - lo.x + PANEL_GAP;
    }
    out
}

fn num(x: f64) -> String {
    format!("{}", round9(x))
}

fn path(panel: &Panel, offset: &Vector2<f64>) -> String {
    let mut d = String::new();
    for (k, &v) in panel.boundary.iter().enumerate() {
        let p = panel.vertices[v] + offset;
        let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, num(p.x), num(p.y));
    }
    d.push('Z');
    d
}

/// SVG with every panel boundary as a closed solid path, laid out by
/// [`pattern_layout`] unless `layout` is given. Originals, when supplied,
/// are drawn dashed under the same translation.
pub fn export_pattern_svg(panels: &[Panel], originals: Option<&[Panel]>, layout: Option<&[Vector2<f64>]>) -> String {
    let computed;
    let offsets = match layout {
        Some(l) => l,
        None => {
            computed = pattern_layout(panels, originals);
            &computed
        }
    };
    let mut all = Vec::new();
    for (i, panel) in panels.iter().enumerate() {
        let o = offsets.get(i).copied().unwrap_or_else(Vector2::zeros);
        all.extend(panel.vertices.iter().map(|p| p + o));
        if let Some(orig) = originals.and_then(|os| os.get(i)) {
            all.extend(orig.vertices.iter().map(|p| p + o));
        }
    }
    let (lo, hi) = bbox(all.into_iter()).unwrap_or((Point2::origin(), Point2::origin()));
    let (w, h) = (hi.x - lo.x + 2.0 * MARGIN, hi.y - lo.y + 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}cm" height="{}cm">"#,
        num(lo.x - MARGIN),
        num(lo.y - MARGIN),
        num(w),
        num(h),
        num(w),
        num(h)
    );
    if let Some(originals) = originals {
        for (i, orig) in originals.iter().enumerate().take(panels.len()) {
            let o = offsets.get(i).copied().unwrap_or_else(Vector2::zeros);
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="gray" stroke-width="0.05" stroke-dasharray="0.4 0.2"/>"#,
                path(orig, &o)
            );
        }
    }
    for (i, panel) in panels.iter().enumerate() {
        let o = offsets.get(i).copied().unwrap_or_else(Vector2::zeros);
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="black" stroke-width="0.05"/>"#,
            path(panel, &o)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(size: f64) -> Panel {
        Panel {
            name: "square".into(),
            vertices: vec![
                Point2::new(0.0, 0.0),
                Point2::new(size, 0.0),
                Point2::new(size, size),
                Point2::new(0.0, size),
            ],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            boundary: vec![0, 1, 2, 3],
            corr: vec![0, 1, 2, 3],
        }
    }

    #[test]
    fn unit_square_path() {
        let svg = export_pattern_svg(&[square(1.0)], None, None);
        assert!(svg.contains(r#"d="M0 0 L1 0 L1 1 L0 1 Z""#), "{svg}");
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(!svg.contains("<text"));
    }

    #[test]
    fn second_panel_offset_by_width_and_gap() {
        let svg = export_pattern_svg(&[square(3.0), square(1.0)], None, None);
        assert!(svg.contains(r#"d="M5 0 L6 0 L6 1 L5 1 Z""#), "{svg}");
    }

    #[test]
    fn originals_are_dashed() {
        let panels = [square(1.0), square(2.0)];
        let originals = [square(1.5), square(1.5)];
        let svg = export_pattern_svg(&panels, Some(&originals), None);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("<path").count(), 4);
        assert_eq!(svg, export_pattern_svg(&panels, Some(&originals), None));
    }
}
