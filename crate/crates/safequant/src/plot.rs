//! SVG heatmap of a covering set sliced down to two continuous axes.
//!
//! Output is plain text built in cell-key order with fixed number
//! formatting, so identical inputs always produce identical bytes.

use std::collections::BTreeMap;

use crate::artifacts::fmt_g9;
use crate::error::{Error, Result};
use crate::oss::CoveringSet;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 55.0;
const CELL_FILL: &str = "#4878a8";

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Parses a `dim=value,dim=value` slice argument into name/value pairs.
pub fn parse_slice(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("slice entry {part:?} is not dim=value")))?;
        out.push((name.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Renders the cells of `set` whose non-axis coordinates match `slice`.
/// Both axes must be continuous dimensions; every other dimension of the
/// grid must be pinned by exactly one slice entry.
pub fn render_heatmap(
    set: &CoveringSet,
    dim_x: &str,
    dim_y: &str,
    slice: &[(String, String)],
) -> Result<String> {
    let spec = set.spec();
    let axis = |name: &str| -> Result<usize> {
        spec.cont_dims
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| {
                Error::Domain(format!("unknown continuous plot dimension {name:?}"))
            })
    };
    let ix = axis(dim_x)?;
    let iy = axis(dim_y)?;
    if ix == iy {
        return Err(Error::Domain(format!(
            "plot axes must differ, got {dim_x:?} twice"
        )));
    }

    // resolve the slice: cont dims pin a cell index, disc dims a value
    let mut cont_pin: BTreeMap<usize, i64> = BTreeMap::new();
    let mut disc_pin: BTreeMap<usize, i64> = BTreeMap::new();
    for (name, value) in slice {
        if name == dim_x || name == dim_y {
            return Err(Error::Domain(format!(
                "dimension {name:?} is a plot axis and cannot be sliced"
            )));
        }
        if let Some(i) = spec.cont_dims.iter().position(|d| d.name == *name) {
            let x: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("slice value {value:?} for {name:?}")))?;
            let d = &spec.cont_dims[i];
            if !(d.lower..=d.upper).contains(&x) {
                return Err(Error::Domain(format!(
                    "slice value {x} for {name:?} lies outside [{}, {}]",
                    d.lower, d.upper
                )));
            }
            cont_pin.insert(i, spec.cell_index(i, x));
        } else if let Some(j) = spec.disc_dims.iter().position(|d| d.name == *name) {
            let v: i64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("slice value {value:?} for {name:?}")))?;
            if !spec.disc_dims[j].values.contains(&v) {
                return Err(Error::Domain(format!(
                    "slice value {v} is not a declared value of {name:?}"
                )));
            }
            disc_pin.insert(j, v);
        } else {
            return Err(Error::Domain(format!("unknown slice dimension {name:?}")));
        }
    }
    for (i, d) in spec.cont_dims.iter().enumerate() {
        if i != ix && i != iy && !cont_pin.contains_key(&i) {
            return Err(Error::Domain(format!(
                "dimension {:?} must be pinned by the slice",
                d.name
            )));
        }
    }
    for (j, d) in spec.disc_dims.iter().enumerate() {
        if !disc_pin.contains_key(&j) {
            return Err(Error::Domain(format!(
                "dimension {:?} must be pinned by the slice",
                d.name
            )));
        }
    }

    let (xlo, xhi) = (spec.cont_dims[ix].lower, spec.cont_dims[ix].upper);
    let (ylo, yhi) = (spec.cont_dims[iy].lower, spec.cont_dims[iy].upper);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_px_x = |x: f64| MARGIN_L + (x - xlo) / (xhi - xlo) * plot_w;
    // larger values sit higher on screen, so the y axis is inverted
    let to_px_y = |y: f64| MARGIN_T + (yhi - y) / (yhi - ylo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "<defs><clipPath id=\"plot\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\
         </clipPath></defs>\n",
        px(MARGIN_L),
        px(MARGIN_T),
        px(plot_w),
        px(plot_h)
    ));

    svg.push_str("<g clip-path=\"url(#plot)\">\n");
    let dx = spec.delta.0[ix];
    let dy = spec.delta.0[iy];
    for key in set.cell_keys() {
        let in_slice = cont_pin.iter().all(|(&i, &k)| key.cont[i] == k)
            && disc_pin.iter().all(|(&j, &v)| key.disc[j] == v);
        if !in_slice {
            continue;
        }
        let cx = spec.cell_center(ix, key.cont[ix]);
        let cy = spec.cell_center(iy, key.cont[iy]);
        svg.push_str(&format!(
            "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{CELL_FILL}\"/>\n",
            px(to_px_x(cx - dx)),
            px(to_px_y(cy + dy)),
            px(to_px_x(cx + dx) - to_px_x(cx - dx)),
            px(to_px_y(cy - dy) - to_px_y(cy + dy)),
        ));
    }
    svg.push_str("</g>\n");

    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
        px(MARGIN_L),
        px(MARGIN_T),
        px(plot_w),
        px(plot_h)
    ));
    let text = |x: String, y: String, anchor: &str, extra: &str, body: &str| {
        format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-family=\"monospace\" \
             font-size=\"13\"{extra}>{body}</text>\n"
        )
    };
    // axis names
    svg.push_str(&text(
        px(MARGIN_L + plot_w / 2.0),
        px(HEIGHT - 12.0),
        "middle",
        "",
        dim_x,
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"13\" transform=\"rotate(-90 {} {})\">{}</text>\n",
        px(16.0),
        px(MARGIN_T + plot_h / 2.0),
        px(16.0),
        px(MARGIN_T + plot_h / 2.0),
        dim_y
    ));
    // bound labels at the corners
    svg.push_str(&text(
        px(MARGIN_L),
        px(HEIGHT - MARGIN_B + 18.0),
        "start",
        "",
        &fmt_g9(xlo),
    ));
    svg.push_str(&text(
        px(WIDTH - MARGIN_R),
        px(HEIGHT - MARGIN_B + 18.0),
        "end",
        "",
        &fmt_g9(xhi),
    ));
    svg.push_str(&text(
        px(MARGIN_L - 6.0),
        px(HEIGHT - MARGIN_B),
        "end",
        "",
        &fmt_g9(ylo),
    ));
    svg.push_str(&text(
        px(MARGIN_L - 6.0),
        px(MARGIN_T + 10.0),
        "end",
        "",
        &fmt_g9(yhi),
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Number of cell rectangles in a rendered heatmap, for tests and tooling.
pub fn cell_rect_count(svg: &str) -> usize {
    svg.matches("class=\"cell\"").count()
}
