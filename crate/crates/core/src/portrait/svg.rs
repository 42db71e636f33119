use std::f64::consts::TAU;
use std::fmt::Write;

use super::{LevelCurve, MotionClass};

const W: f64 = 720.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

fn sx(g: f64) -> f64 {
    PAD + (W - 2.0 * PAD) * g / TAU
}

fn sy(x: f64) -> f64 {
    H - PAD - (H - 2.0 * PAD) * x
}

fn style(class: MotionClass) -> &'static str {
    match class {
        MotionClass::Separatrix => "stroke=\"#c0392b\" stroke-width=\"2.5\" stroke-dasharray=\"6 3\"",
        MotionClass::Libration => "stroke=\"#2471a3\" stroke-width=\"1.3\"",
        MotionClass::Rotation => "stroke=\"#229954\" stroke-width=\"1.3\"",
        _ => "stroke=\"#7f8c8d\" stroke-width=\"1.3\"",
    }
}

/// Hand-emitted SVG of a fan of level curves in the `(g, G/Lambda)` plane.
pub fn render_svg(delta: f64, curves: &[LevelCurve]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">g</text>", W / 2.0, H - 8.0);
    let _ = writeln!(s, "<text x=\"10\" y=\"{}\" font-size=\"13\">G/&#923;</text>", H / 2.0);
    let _ = writeln!(s, "<text x=\"{PAD}\" y=\"24\" font-size=\"13\">delta = {delta}</text>");
    for (i, lab) in ["0", "&#960;", "2&#960;"].iter().enumerate() {
        let x = sx(TAU * i as f64 / 2.0);
        let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{lab}</text>", H - PAD + 14.0);
    }
    for c in curves {
        for b in &c.branches {
            if b.points.is_empty() {
                continue;
            }
            let mut d = String::new();
            let mut prev_g: Option<f64> = None;
            for &(g, x) in &b.points {
                let jump = prev_g.is_some_and(|p| (g - p).abs() > 0.5 * TAU);
                let cmd = if prev_g.is_none() || jump { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.2},{:.2} ", sx(g), sy(x));
                prev_g = Some(g);
            }
            let _ = writeln!(
                s,
                "<path class=\"{:?}\" data-level=\"{}\" data-branch=\"{}\" d=\"{}\" fill=\"none\" {}/>",
                c.class,
                c.spec.level,
                b.label,
                d.trim_end(),
                style(c.class)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
