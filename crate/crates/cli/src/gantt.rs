//! SVG Gantt chart: machines top to bottom, time left to right, one
//! rectangle per placed job.

use std::fmt::Write as _;

use moldable_core::{Instance, Schedule};

const WIDTH: f64 = 960.0;
const ROW: f64 = 18.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

pub fn render_gantt(inst: &Instance, sched: &Schedule) -> String {
    let span = sched.makespan.to_f64().max(f64::MIN_POSITIVE);
    let row = if inst.m > 200 { (800.0 / inst.m as f64).max(1.0) } else { ROW };
    let height = inst.m as f64 * row + 2.0 * MARGIN;
    let scale = (WIDTH - 2.0 * MARGIN) / span;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.1}" viewBox="0 0 {WIDTH} {height:.1}">"#
    );
    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="10">"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.1}">makespan {:.4} on {} machines</text>"#,
        MARGIN - 12.0,
        sched.makespan.to_f64(),
        inst.m
    );
    let axis_y = height - MARGIN;
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for tick in 0..=4 {
        let t = span * tick as f64 / 4.0;
        let x = MARGIN + t * scale;
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t:.3}</text>"#, axis_y + 14.0);
    }
    for p in &sched.placements {
        let x = MARGIN + p.start.to_f64() * scale;
        let y = MARGIN + p.first_machine as f64 * row;
        let w = (p.duration.to_f64() * scale).max(0.5);
        let h = p.width as f64 * row;
        let id = inst.jobs.get(p.job).map_or(p.job as i64, |j| j.id);
        let colour = PALETTE[p.job % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{colour}" stroke="white" stroke-width="0.5"><title>job {id}: machines {}..{}, start {}, duration {}</title></rect>"#,
            p.first_machine,
            p.first_machine + p.width - 1,
            p.start,
            p.duration
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
