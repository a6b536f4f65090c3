//! SVG rendering of instances and gadgets: vertices colored by measure,
//! triangle edges drawn, selected triangles shaded.

use crate::error::{Error, Result};
use crate::measures::{CombinationMeasure, ProblemInstance};
use crate::rational::Rational;
use crate::reduction::{GadgetGraph, GridPoint};
use num::ToPrimitive;
use std::collections::BTreeSet;
use std::fmt::Write;

const MEASURE_COLORS: [&str; 3] = ["blue", "red", "cyan"];
const EXTRA_COLORS: [&str; 3] = ["green", "orange", "purple"];

fn color_for(i: usize) -> &'static str {
    if i < 3 {
        MEASURE_COLORS[i]
    } else {
        EXTRA_COLORS[i % 3]
    }
}

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            body: String::new(),
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn cover(&mut self, x: f64, y: f64) {
        self.min = (self.min.0.min(x), self.min.1.min(y));
        self.max = (self.max.0.max(x), self.max.1.max(y));
    }

    fn finish(self) -> String {
        let (min, max) = if self.min.0.is_finite() {
            (self.min, self.max)
        } else {
            ((0.0, 0.0), (1.0, 1.0))
        };
        let margin = 2.0 + (max.0 - min.0).max(max.1 - min.1) * 0.05;
        let w = max.0 - min.0 + 2.0 * margin;
        let h = max.1 - min.1 + 2.0 * margin;
        // flip the y axis so the figures read with y growing upwards
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.2} {:.2} {:.2} {:.2}\">\n\
             <g transform=\"translate(0,{:.2}) scale(1,-1)\">\n{}</g>\n</svg>\n",
            min.0 - margin,
            min.1 - margin,
            w,
            h,
            max.1 + min.1,
            self.body
        )
    }
}

fn coord(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

/// Renders a 2-dimensional instance: support points colored per measure,
/// radius scaled by mass.
pub fn plot_instance(inst: &ProblemInstance) -> Result<String> {
    if inst.dim() != 2 && !inst.measures.iter().all(|m| m.is_empty()) {
        return Err(Error::Precondition(format!(
            "plotting needs 2-dimensional data, got d = {}",
            inst.dim()
        )));
    }
    let mut canvas = Canvas::new();
    for (i, measure) in inst.measures.iter().enumerate() {
        for slot in &measure.slots {
            let x = coord(&slot.point.coords[0]);
            let y = coord(&slot.point.coords[1]);
            canvas.cover(x, y);
            let r = 0.4 + coord(&slot.mass) * 1.2;
            writeln!(
                canvas.body,
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.3}\" fill=\"{}\" fill-opacity=\"0.75\"/>",
                color_for(i)
            )
            .unwrap();
        }
    }
    Ok(canvas.finish())
}

/// Renders a gadget: triangle edges, vertices colored per measure, and the
/// triangles selected by `selection` shaded gray.
pub fn plot_gadget(g: &GadgetGraph, selection: Option<&CombinationMeasure>) -> Result<String> {
    let mut selected: BTreeSet<usize> = BTreeSet::new();
    if let Some(p) = selection {
        let registry = g.triangle_index();
        for entry in &p.entries {
            let corners: [GridPoint; 3] = [
                *g.listings[0]
                    .get(entry.tuple.0[0])
                    .ok_or_else(|| Error::IndexOutOfRange("tuple slot".into()))?,
                *g.listings[1]
                    .get(entry.tuple.0[1])
                    .ok_or_else(|| Error::IndexOutOfRange("tuple slot".into()))?,
                *g.listings[2]
                    .get(entry.tuple.0[2])
                    .ok_or_else(|| Error::IndexOutOfRange("tuple slot".into()))?,
            ];
            if let Some(&t) = registry.get(&corners) {
                selected.insert(t);
            }
        }
    }
    let mut canvas = Canvas::new();
    for (idx, t) in g.triangles.iter().enumerate() {
        let pts: Vec<String> = t
            .corners
            .iter()
            .map(|&(x, y)| {
                canvas.cover(x as f64, y as f64);
                format!("{x},{y}")
            })
            .collect();
        let fill = if selected.contains(&idx) {
            "lightgray"
        } else {
            "none"
        };
        writeln!(
            canvas.body,
            "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"0.3\"/>",
            pts.join(" ")
        )
        .unwrap();
    }
    for (&(x, y), &c) in &g.vertex_colors {
        canvas.cover(x as f64, y as f64);
        writeln!(
            canvas.body,
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"0.8\" fill=\"{}\"/>",
            color_for(c)
        )
        .unwrap();
    }
    for &(_, (x, y)) in &g.element_points {
        writeln!(
            canvas.body,
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"1.4\" fill=\"none\" stroke=\"black\" stroke-width=\"0.25\"/>"
        )
        .unwrap();
    }
    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{square_instance, DiscreteMeasure, ProblemInstance};
    use crate::rational::{int, rat};

    #[test]
    fn renders_square_instance() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let svg = plot_instance(&inst).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("blue"));
        assert!(svg.contains("red"));
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn renders_empty_instance() {
        let inst = ProblemInstance::new(
            vec![DiscreteMeasure::new(Vec::new())],
            vec![int(1)],
        );
        let svg = plot_instance(&inst).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
