//! Static SVG plot of a traced curve in its parameter domain.

use std::fmt::Write;

use tancurve::expr::Domain;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

struct Frame {
    domain: Domain,
}

impl Frame {
    fn x(&self, u: f64) -> f64 {
        let d = &self.domain.u;
        MARGIN + (u - d.lo) / d.width() * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let d = &self.domain.v;
        SIZE - MARGIN - (v - d.lo) / d.width() * (SIZE - 2.0 * MARGIN)
    }

    /// Wraps periodic coordinates into the plotted rectangle.
    fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let w = |x: f64, periodic: bool, lo: f64, width: f64| {
            if periodic {
                lo + (x - lo).rem_euclid(width)
            } else {
                x
            }
        };
        [
            w(p[0], self.domain.periodic_u, self.domain.u.lo, self.domain.u.width()),
            w(p[1], self.domain.periodic_v, self.domain.v.lo, self.domain.v.width()),
        ]
    }
}

pub fn trace_plot(domain: &Domain, vertices: &[[f64; 2]], seed: [f64; 2], closed: bool) -> String {
    let f = Frame { domain: *domain };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{m:.2}" y="{m:.2}" width="{w:.2}" height="{w:.2}" fill="#fafafa" stroke="#444"/>"##,
        m = MARGIN,
        w = SIZE - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">u</text>"#,
        SIZE / 2.0,
        SIZE - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-size="12" text-anchor="middle">v</text>"#,
        SIZE / 2.0
    );
    for (x, anchor, value) in [
        (f.x(domain.u.lo), "start", domain.u.lo),
        (f.x(domain.u.hi), "end", domain.u.hi),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="{anchor}">{value:.4}</text>"#,
            SIZE - MARGIN + 14.0
        );
    }
    for (y, value) in [(f.y(domain.v.lo), domain.v.lo), (f.y(domain.v.hi), domain.v.hi)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{y:.2}" font-size="10" text-anchor="end">{value:.4}</text>"#,
            MARGIN - 4.0
        );
    }

    // split where a periodic wrap makes the curve jump across the plot
    let mut pieces: Vec<Vec<[f64; 2]>> = vec![Vec::new()];
    let mut points: Vec<[f64; 2]> = vertices.iter().map(|p| f.wrap(*p)).collect();
    if closed {
        if let Some(first) = points.first().copied() {
            points.push(first);
        }
    }
    for p in points {
        let current = pieces.last_mut().expect("non-empty");
        if let Some(q) = current.last() {
            let jump_u = (p[0] - q[0]).abs() > 0.5 * domain.u.width();
            let jump_v = (p[1] - q[1]).abs() > 0.5 * domain.v.width();
            if jump_u || jump_v {
                pieces.push(Vec::new());
            }
        }
        pieces.last_mut().expect("non-empty").push(p);
    }
    for piece in pieces.iter().filter(|p| p.len() > 1) {
        let pts: Vec<String> = piece.iter().map(|p| format!("{:.3},{:.3}", f.x(p[0]), f.y(p[1]))).collect();
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{}"/>"##,
            pts.join(" ")
        );
    }
    let seed = f.wrap(seed);
    let _ = writeln!(
        s,
        r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="#c0392b"/>"##,
        f.x(seed[0]),
        f.y(seed[1])
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tancurve::expr::Interval;

    #[test]
    fn wrapped_curve_is_split() {
        let d = Domain::new(Interval::new(0.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap())
            .with_periodic(false, true);
        let svg = trace_plot(&d, &[[0.5, 0.9], [0.5, 0.95], [0.5, 1.05], [0.5, 1.1]], [0.5, 0.9], false);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("<circle"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
