//! SVG rendering of a two-dimensional amoeba raster.

use std::collections::BTreeMap;
use std::fmt::Write;

use amoeba_core::amoeba::{AmoebaRaster, Cell, ComplementComponent};
use amoeba_core::lattice::LatticeVector;

const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#bc80bd", "#ccebc5",
];
const AMOEBA: &str = "#303030";
const UNKNOWN: &str = "#ffffff";
const CELL: usize = 3;

fn fill<'a>(cell: &Cell, colours: &'a BTreeMap<LatticeVector, &'static str>) -> &'a str {
    match cell {
        Cell::Amoeba => AMOEBA,
        Cell::Unknown => UNKNOWN,
        Cell::Complement(p) => colours.get(p).copied().unwrap_or(UNKNOWN),
    }
}

/// Draws the raster with one colour per order and a `F_{i,j}` label at each
/// component's representative. Row 0 of the image is the top of the box.
pub fn render(raster: &AmoebaRaster, components: &[ComplementComponent]) -> String {
    assert_eq!(raster.dim(), 2, "only planar rasters can be drawn");
    let res = raster.resolution;
    let colours: BTreeMap<LatticeVector, &'static str> =
        raster.labels().into_iter().enumerate().map(|(k, p)| (p, PALETTE[k % PALETTE.len()])).collect();
    let size = res * CELL;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" shape-rendering="crispEdges">"#
    )
    .unwrap();
    for row in 0..res {
        let j = res - 1 - row;
        let mut i = 0;
        while i < res {
            let colour = fill(&raster.cells[raster.flat_index(&[i, j])], &colours);
            let start = i;
            while i < res && fill(&raster.cells[raster.flat_index(&[i, j])], &colours) == colour {
                i += 1;
            }
            writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{CELL}" fill="{colour}"/>"#,
                start * CELL,
                row * CELL,
                (i - start) * CELL
            )
            .unwrap();
        }
    }
    let (bx, by) = (raster.bounds[0], raster.bounds[1]);
    for c in components {
        let px = (c.representative[0] - bx.0) / (bx.1 - bx.0) * size as f64;
        let py = (by.1 - c.representative[1]) / (by.1 - by.0) * size as f64;
        let label = c.order.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        writeln!(
            out,
            r#"<text x="{px:.1}" y="{py:.1}" font-family="serif" font-size="14" text-anchor="middle">F<tspan baseline-shift="sub" font-size="10">{label}</tspan></text>"#
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
