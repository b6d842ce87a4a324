//! Plot-ready output: gnuplot two-column data and a small log–log SVG.

use std::fmt::Write as _;

use grazing_core::fit::ScalingFit;

/// `eps value` lines; points outside the fit window are commented out so
/// gnuplot plots exactly what was fitted.
pub fn gnuplot_dat(fit: &ScalingFit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}: slope {:.6} log_coefficient {:.6}", fit.observable, fit.slope, fit.log_coefficient);
    let _ = writeln!(s, "# eps {}", fit.observable);
    for (i, (e, v)) in fit.eps.iter().zip(&fit.values).enumerate() {
        let mark = if (fit.window.0..fit.window.1).contains(&i) { "" } else { "# " };
        let _ = writeln!(s, "{mark}{e:e} {:e}", v.abs());
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Log–log scatter of `|value|` against ε with the fitted line.
pub fn svg(fit: &ScalingFit) -> String {
    let pts: Vec<(f64, f64)> = fit
        .eps
        .iter()
        .zip(&fit.values)
        .filter(|(e, v)| **e > 0.0 && v.abs() > 0.0)
        .map(|(e, v)| (e.log10(), v.abs().log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">log10 eps</text>"#,
        W / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle" font-family="sans-serif" font-size="13">log10 |{}|</text>"#,
        H / 2.0,
        H / 2.0,
        fit.observable
    );
    for (lx, ly, anchor) in [(x0, y0 - (y1 - y0) * 0.08, "start"), (x1, y0 - (y1 - y0) * 0.08, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{lx:.2}</text>"#,
            sx(lx),
            sy(ly) + 4.0
        );
    }
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
    // the fitted line is ln|v| = c + p ln eps, i.e. the same slope in log10
    let line = |x: f64| fit.log_coefficient / std::f64::consts::LN_10 + fit.slope * x;
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
        sx(x0),
        sy(line(x0)),
        sx(x1),
        sy(line(x1))
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="14">{}: slope {:.4}</text>"#,
        W / 2.0,
        fit.observable,
        fit.slope
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use grazing_core::fit::{fit_power_law, log_space};

    #[test]
    fn dat_marks_window() {
        let e = log_space(1e-8, 1e-4, 5);
        let v: Vec<f64> = e.iter().map(|x| x.powf(0.25)).collect();
        let f = fit_power_law("delta", &e, &v, Some((0, 4))).unwrap();
        let dat = gnuplot_dat(&f);
        let lines: Vec<&str> = dat.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[2].starts_with("1e-8 "));
        assert!(lines[6].starts_with("# 1e-4 "));
    }

    #[test]
    fn svg_is_well_formed() {
        let e = log_space(1e-8, 1e-4, 5);
        let f = fit_power_law("c", &e, &[1.0; 5], None).unwrap();
        let s = svg(&f);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 5);
    }
}
