//! Finite patches of the anisotropic honeycomb lattice.
//!
//! Sites sit on `depth` rows of `width` columns, indexed `row * width + col`.
//! Consecutive rows alternate between vertical bonds (same column) and
//! zigzag bonds (same column plus one diagonal neighbour whose side
//! alternates from one zigzag layer to the next, open at the ends).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the bottom row couples to the row above it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BottomAttachment {
    #[default]
    Vertical,
    Zigzag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoneycombPatch {
    pub width: usize,
    pub depth: usize,
    pub attachment: BottomAttachment,
    pub vertical_edges: Vec<(usize, usize)>,
    /// Zigzag bonds as `(lower, upper)` pairs.
    pub zigzag_edges: Vec<(usize, usize)>,
    pub bottom: Vec<usize>,
    pub top: Vec<usize>,
    pub region_a: Vec<usize>,
}

/// Bond layer between row `r` and row `r + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Layer {
    Vertical,
    /// Upper column `c` also couples to lower column `c - offset`.
    Zigzag {
        offset: isize,
    },
}

impl HoneycombPatch {
    /// Patch with region A the last `region_len` sites of the top row.
    pub fn new(width: usize, depth: usize, region_len: usize, attachment: BottomAttachment) -> Result<Self> {
        if width == 0 {
            return Err(Error::InconsistentPatch("width must be at least 1".into()));
        }
        if depth < 2 {
            return Err(Error::InconsistentPatch(
                "depth must be at least 2 so the boundaries are disjoint".into(),
            ));
        }
        if region_len > width {
            return Err(Error::InconsistentPatch(format!(
                "region of {region_len} sites exceeds width {width}"
            )));
        }
        let mut vertical_edges = Vec::new();
        let mut zigzag_edges = Vec::new();
        for row in 0..depth - 1 {
            match layer_kind(attachment, row) {
                Layer::Vertical => {
                    for c in 0..width {
                        vertical_edges.push((row * width + c, (row + 1) * width + c));
                    }
                }
                Layer::Zigzag { offset } => {
                    for c in 0..width {
                        let lower = row * width + c;
                        zigzag_edges.push((lower, (row + 1) * width + c));
                        let diag = c as isize + offset;
                        if (0..width as isize).contains(&diag) {
                            zigzag_edges.push((lower, (row + 1) * width + diag as usize));
                        }
                    }
                }
            }
        }
        let top: Vec<usize> = ((depth - 1) * width..depth * width).collect();
        let patch = Self {
            width,
            depth,
            attachment,
            vertical_edges,
            zigzag_edges,
            bottom: (0..width).collect(),
            region_a: top[width - region_len..].to_vec(),
            top,
        };
        patch.validate()?;
        Ok(patch)
    }

    pub fn num_sites(&self) -> usize {
        self.width * self.depth
    }

    pub(crate) fn layer(&self, row: usize) -> Layer {
        layer_kind(self.attachment, row)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_sites();
        let bad = |m: String| Err(Error::InconsistentPatch(m));
        let mut degree = vec![0usize; n];
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in self.vertical_edges.iter().chain(&self.zigzag_edges) {
            if a >= n || b >= n || a == b {
                return bad(format!("bad edge ({a}, {b})"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return bad(format!("edge ({a}, {b}) listed twice"));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some(s) = degree.iter().position(|&k| k > 3) {
            return bad(format!("site {s} has degree {}", degree[s]));
        }
        if self.bottom.iter().any(|s| self.top.contains(s)) {
            return bad("bottom and top boundaries overlap".into());
        }
        if let Some(s) = self.region_a.iter().find(|s| !self.top.contains(s)) {
            return bad(format!("region site {s} is not on the top boundary"));
        }
        Ok(())
    }
}

fn layer_kind(attachment: BottomAttachment, row: usize) -> Layer {
    let shift = match attachment {
        BottomAttachment::Vertical => 0,
        BottomAttachment::Zigzag => 1,
    };
    if (row + shift).is_multiple_of(2) {
        Layer::Vertical
    } else {
        let zig_index = (row + shift - 1) / 2;
        Layer::Zigzag {
            offset: if zig_index.is_multiple_of(2) { 1 } else { -1 },
        }
    }
}
