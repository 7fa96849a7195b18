//! Sampled membership curves as CSV or a static SVG.

use std::fmt::Write;

use crate::engine::Estimate;
use crate::fuzzy::Interval;
use crate::oracle::MembershipCurve;

pub const DEFAULT_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub x: Vec<f64>,
    pub membership: Vec<f64>,
    pub oracle: Option<Vec<f64>>,
}

/// Plot range: the engine support widened by a tenth on each side (clipped to
/// [0, 1] for probabilities), and stretched to cover the oracle support.
pub fn plot_range(engine: &Estimate, oracle: Option<&MembershipCurve>) -> Interval {
    let mut s = engine.support();
    if let Some(c) = oracle {
        s = Interval::new(s.lo.min(c.lo), s.hi.max(c.hi));
    }
    let pad = if s.width() > 0.0 {
        0.1 * s.width()
    } else {
        0.1 * s.lo.abs().max(1e-3)
    };
    let (mut lo, mut hi) = (s.lo - pad, s.hi + pad);
    if matches!(engine, Estimate::Probability(_)) {
        lo = lo.max(0.0);
        hi = hi.min(1.0);
    }
    Interval::new(lo, hi)
}

pub fn sample(engine: &Estimate, oracle: Option<&MembershipCurve>, points: usize) -> Samples {
    let r = plot_range(engine, oracle);
    let x: Vec<f64> = (0..points)
        .map(|i| {
            if points == 1 {
                engine.mean()
            } else {
                r.lo + r.width() * i as f64 / (points - 1) as f64
            }
        })
        .collect();
    let membership = x.iter().map(|&v| engine.membership_at(v)).collect();
    let oracle = oracle.map(|c| x.iter().map(|&v| c.membership_at(v)).collect());
    Samples { x, membership, oracle }
}

pub fn to_csv(s: &Samples) -> String {
    let mut out = String::from(if s.oracle.is_some() {
        "x,membership,oracle_membership\n"
    } else {
        "x,membership\n"
    });
    for i in 0..s.x.len() {
        write!(out, "{},{}", s.x[i], s.membership[i]).unwrap();
        if let Some(o) = &s.oracle {
            write!(out, ",{}", o[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 360.0;
const M: f64 = 40.0;

fn polyline(out: &mut String, xs: &[f64], ys: &[f64], lo: f64, hi: f64, color: &str) {
    let span = if hi > lo { hi - lo } else { 1.0 };
    out.push_str("  <polyline fill=\"none\" stroke=\"");
    out.push_str(color);
    out.push_str("\" stroke-width=\"1.5\" points=\"");
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let px = M + (x - lo) / span * (W - 2.0 * M);
        let py = H - M - y * (H - 2.0 * M);
        write!(out, "{px:.2},{py:.2}").unwrap();
    }
    out.push_str("\"/>\n");
}

/// Static SVG; the plotted samples are embedded verbatim as CSV metadata.
pub fn to_svg(s: &Samples, title: &str) -> String {
    let lo = s.x.first().copied().unwrap_or(0.0);
    let hi = s.x.last().copied().unwrap_or(1.0);
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    )
    .unwrap();
    writeln!(out, "  <title>{}</title>", escape(title)).unwrap();
    writeln!(out, "  <metadata>\n{}  </metadata>", to_csv(s)).unwrap();
    writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>"
    )
    .unwrap();
    writeln!(
        out,
        "  <path d=\"M{M},{M} V{} H{}\" fill=\"none\" stroke=\"black\"/>",
        H - M,
        W - M
    )
    .unwrap();
    writeln!(
        out,
        "  <text x=\"{M}\" y=\"{}\" font-size=\"11\">{lo:.4}</text>",
        H - M + 16.0
    )
    .unwrap();
    writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{hi:.4}</text>",
        W - M,
        H - M + 16.0
    )
    .unwrap();
    writeln!(out, "  <text x=\"4\" y=\"{}\" font-size=\"11\">1</text>", M + 4.0).unwrap();
    polyline(&mut out, &s.x, &s.membership, lo, hi, "#1f5fa8");
    if let Some(o) = &s.oracle {
        polyline(&mut out, &s.x, o, lo, hi, "#c0392b");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
