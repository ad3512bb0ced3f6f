//! SVG maps of reserve solutions.
//!
//! Each panel is an `n x n` grid; a cell is green when the parcel is
//! protected and orange otherwise, and carries one count label per species.
//! Label positions depend on the species count: centre (1), top/bottom (2),
//! top/middle/bottom (3), corners (4), corners plus centre (5).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiment::similarity_of;
use crate::grid::CountsGrid;
use crate::solver::ReserveSolution;

pub const PRESERVED_FILL: &str = "#2e8b57";
pub const UNPRESERVED_FILL: &str = "#e8861e";

const CELL: f64 = 48.0;
const MARGIN: f64 = 16.0;
const GAP: f64 = 32.0;
const TITLE: f64 = 24.0;
const CAPTION: f64 = 28.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub preserved: String,
    pub unpreserved: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            preserved: PRESERVED_FILL.into(),
            unpreserved: UNPRESERVED_FILL.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationLayout {
    Center,
    TopBottom,
    TopMiddleBottom,
    Corners,
    CornersAndCenter,
    /// All counts in one comma-separated label.
    Inline,
}

impl AnnotationLayout {
    pub fn for_species(species: usize) -> Result<Self> {
        Ok(match species {
            0 | 1 => AnnotationLayout::Center,
            2 => AnnotationLayout::TopBottom,
            3 => AnnotationLayout::TopMiddleBottom,
            4 => AnnotationLayout::Corners,
            5 => AnnotationLayout::CornersAndCenter,
            _ => return Err(Error::LayoutUnsupported { species }),
        })
    }

    /// Label anchors as fractions of the cell, in species order.
    pub fn slots(self) -> &'static [(f64, f64)] {
        const TL: (f64, f64) = (0.27, 0.32);
        const TR: (f64, f64) = (0.73, 0.32);
        const BL: (f64, f64) = (0.27, 0.84);
        const BR: (f64, f64) = (0.73, 0.84);
        const MID: (f64, f64) = (0.5, 0.6);
        match self {
            AnnotationLayout::Center | AnnotationLayout::Inline => &[MID],
            AnnotationLayout::TopBottom => &[(0.5, 0.4), (0.5, 0.82)],
            AnnotationLayout::TopMiddleBottom => &[(0.5, 0.3), (0.5, 0.6), (0.5, 0.9)],
            AnnotationLayout::Corners => &[TL, TR, BL, BR],
            AnnotationLayout::CornersAndCenter => &[TL, TR, MID, BL, BR],
        }
    }

    fn font_size(self) -> f64 {
        match self {
            AnnotationLayout::Center | AnnotationLayout::TopBottom => 13.0,
            AnnotationLayout::Inline => 9.0,
            _ => 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x: Vec<bool>,
    pub annotations: CountsGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub panels: Vec<Panel>,
    pub caption: Option<String>,
    pub palette: Palette,
    pub layout: AnnotationLayout,
}

impl RenderSpec {
    pub fn single(title: &str, solution: &ReserveSolution, counts: &CountsGrid) -> Result<Self> {
        let layout = AnnotationLayout::for_species(counts.species())?;
        RenderSpec::single_with_layout(title, solution, counts, layout)
    }

    pub fn single_with_layout(
        title: &str,
        solution: &ReserveSolution,
        counts: &CountsGrid,
        layout: AnnotationLayout,
    ) -> Result<Self> {
        Ok(RenderSpec {
            panels: vec![Panel {
                title: title.into(),
                x: solution.x.clone(),
                annotations: counts.clone(),
            }],
            caption: None,
            palette: Palette::default(),
            layout,
        })
    }

    /// Side-by-side panels with a caption giving their similarity.
    pub fn pair(
        first: (&str, &ReserveSolution, &CountsGrid),
        second: (&str, &ReserveSolution, &CountsGrid),
    ) -> Result<Self> {
        let layout = AnnotationLayout::for_species(first.2.species().max(second.2.species()))?;
        RenderSpec::pair_with_layout(first, second, layout)
    }

    pub fn pair_with_layout(
        first: (&str, &ReserveSolution, &CountsGrid),
        second: (&str, &ReserveSolution, &CountsGrid),
        layout: AnnotationLayout,
    ) -> Result<Self> {
        let same = similarity_of(&first.1.x, &second.1.x)?;
        Ok(RenderSpec {
            panels: [first, second]
                .into_iter()
                .map(|(title, sol, counts)| Panel {
                    title: title.into(),
                    x: sol.x.clone(),
                    annotations: counts.clone(),
                })
                .collect(),
            caption: Some(similarity_caption(same, first.1.parcels())),
            palette: Palette::default(),
            layout,
        })
    }

    pub fn with_layout(mut self, layout: AnnotationLayout) -> Self {
        self.layout = layout;
        self
    }
}

pub fn similarity_caption(same: usize, parcels: usize) -> String {
    format!("{same}/{parcels} parcels have the same protection status")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_grid(spec: &RenderSpec) -> Result<String> {
    let first = spec
        .panels
        .first()
        .ok_or_else(|| Error::ShapeMismatch("nothing to render".into()))?;
    let n = first.annotations.n();
    for (k, panel) in spec.panels.iter().enumerate() {
        if panel.annotations.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "panel {k} is {0}x{0}, panel 0 is {n}x{n}",
                panel.annotations.n()
            )));
        }
        if panel.x.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "panel {k} has {} decisions for {} parcels",
                panel.x.len(),
                n * n
            )));
        }
        let species = panel.annotations.species();
        if spec.layout != AnnotationLayout::Inline && species > spec.layout.slots().len() {
            return Err(Error::LayoutUnsupported { species });
        }
    }

    let side = n as f64 * CELL;
    let panels = spec.panels.len() as f64;
    let width = 2.0 * MARGIN + panels * side + (panels - 1.0) * GAP;
    let caption_h = if spec.caption.is_some() { CAPTION } else { 0.0 };
    let height = 2.0 * MARGIN + TITLE + side + caption_h;
    let font = spec.layout.font_size();

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    for (k, panel) in spec.panels.iter().enumerate() {
        let left = MARGIN + k as f64 * (side + GAP);
        let top = MARGIN + TITLE;
        let _ = writeln!(svg, r#"<g class="panel">"#);
        let _ = writeln!(
            svg,
            r#"<text class="title" x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
            left + side / 2.0,
            MARGIN + 16.0,
            escape(&panel.title)
        );
        for p in 0..n * n {
            let (row, col) = (p / n, p % n);
            let (x, y) = (left + col as f64 * CELL, top + row as f64 * CELL);
            let fill = if panel.x[p] {
                &spec.palette.preserved
            } else {
                &spec.palette.unpreserved
            };
            let _ = writeln!(
                svg,
                r##"<rect class="cell" x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="{fill}" stroke="#ffffff" stroke-width="1"/>"##
            );
            let counts = panel.annotations.at(p);
            let labels: Vec<String> = if spec.layout == AnnotationLayout::Inline {
                vec![counts.iter().map(u64::to_string).collect::<Vec<_>>().join(",")]
            } else {
                counts.iter().map(u64::to_string).collect()
            };
            for (label, (fx, fy)) in labels.iter().zip(spec.layout.slots()) {
                let _ = writeln!(
                    svg,
                    r#"<text class="count" x="{:.1}" y="{:.1}" font-size="{font:.0}" text-anchor="middle">{label}</text>"#,
                    x + fx * CELL,
                    y + fy * CELL,
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    if let Some(caption) = &spec.caption {
        let _ = writeln!(
            svg,
            r#"<text class="caption" x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
            width / 2.0,
            MARGIN + TITLE + side + 20.0,
            escape(caption)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
