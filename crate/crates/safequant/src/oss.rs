//! Operational state space and δ-resolution covering sets.
//!
//! The state space is a box of continuous dimensions crossed with finite
//! integer sets for discrete dimensions. A covering set is a collection of
//! centroids on a fixed grid of cells of width `2δ` per continuous dimension;
//! the region it describes is the union of element-wise `±δ` boxes around the
//! centroids, with discrete coordinates matched exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of grid cells a spec may induce.
pub const DEFAULT_CENTROID_CAPACITY: usize = 10_000_000;

// Relative slack when counting how many 2δ cells tile a span, so that an
// exactly divisible span does not gain a spurious extra cell from rounding.
const CELL_COUNT_SLACK: f64 = 1e-12;

// Relative slack on the ±δ box membership test. A point on a shared cell
// boundary is exactly δ from both centers in real arithmetic; the computed
// distance can land a few ulps past δ and must still count as covered.
const COVER_SLACK: f64 = 1e-9;

/// Identifier of one centroid within a covering set. Ids are assigned
/// sequentially at insertion and never reused.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct CentroidId(pub u64);

impl fmt::Display for CentroidId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One state: continuous coordinates followed by discrete coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub cont: Vec<f64>,
    pub disc: Vec<i64>,
}

impl StatePoint {
    pub fn new(cont: Vec<f64>, disc: Vec<i64>) -> Self {
        StatePoint { cont, disc }
    }

    /// A point with no discrete coordinates.
    pub fn continuous(cont: Vec<f64>) -> Self {
        StatePoint { cont, disc: Vec::new() }
    }
}

/// Per-dimension half-widths of the covering boxes. One entry per continuous
/// dimension; discrete dimensions are matched exactly and carry no radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector(pub Vec<f64>);

/// Bounds of one continuous dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContDim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl ContDim {
    pub fn new(name: &str, lower: f64, upper: f64) -> Self {
        ContDim { name: name.to_string(), lower, upper }
    }
}

/// Admissible values of one discrete dimension, kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscDim {
    pub name: String,
    pub values: Vec<i64>,
}

impl DiscDim {
    pub fn new(name: &str, values: Vec<i64>) -> Self {
        DiscDim { name: name.to_string(), values }
    }
}

/// The operational state space: admissible box, grid resolution, and the
/// scenario horizon K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OssSpec {
    pub cont_dims: Vec<ContDim>,
    pub disc_dims: Vec<DiscDim>,
    pub delta: DeltaVector,
    pub horizon: usize,
}

impl OssSpec {
    pub fn new(
        cont_dims: Vec<ContDim>,
        disc_dims: Vec<DiscDim>,
        delta: DeltaVector,
        horizon: usize,
    ) -> Result<Self> {
        if delta.0.len() != cont_dims.len() {
            return Err(Error::InvalidSpec(format!(
                "delta has {} entries for {} continuous dimensions",
                delta.0.len(),
                cont_dims.len()
            )));
        }
        for d in &cont_dims {
            if !(d.lower < d.upper) || !d.lower.is_finite() || !d.upper.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "dimension {} needs finite lower < upper, got [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
        }
        for (i, &dv) in delta.0.iter().enumerate() {
            if !(dv > 0.0) || !dv.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "delta for dimension {} must be positive, got {}",
                    cont_dims[i].name, dv
                )));
            }
        }
        let mut disc_dims = disc_dims;
        for d in &mut disc_dims {
            d.values.sort_unstable();
            d.values.dedup();
            if d.values.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "discrete dimension {} has an empty value set",
                    d.name
                )));
            }
        }
        if horizon == 0 {
            return Err(Error::InvalidSpec("horizon must be at least 1".into()));
        }
        Ok(OssSpec { cont_dims, disc_dims, delta, horizon })
    }

    pub fn n_cont(&self) -> usize {
        self.cont_dims.len()
    }

    pub fn n_disc(&self) -> usize {
        self.disc_dims.len()
    }

    /// Errors unless the point has the arity this spec expects.
    pub fn check_point(&self, p: &StatePoint) -> Result<()> {
        if p.cont.len() != self.n_cont() {
            return Err(Error::DimensionMismatch {
                kind: "continuous",
                expected: self.n_cont(),
                got: p.cont.len(),
            });
        }
        if p.disc.len() != self.n_disc() {
            return Err(Error::DimensionMismatch {
                kind: "discrete",
                expected: self.n_disc(),
                got: p.disc.len(),
            });
        }
        Ok(())
    }

    /// Membership in the admissible region. Bounds are inclusive on both ends;
    /// discrete coordinates must hold declared values. Assumes arity matches.
    pub fn in_space(&self, p: &StatePoint) -> bool {
        for (i, d) in self.cont_dims.iter().enumerate() {
            let x = p.cont[i];
            if !(x >= d.lower && x <= d.upper) {
                return false;
            }
        }
        for (j, d) in self.disc_dims.iter().enumerate() {
            if d.values.binary_search(&p.disc[j]).is_err() {
                return false;
            }
        }
        true
    }

    /// Number of width-2δ cells tiling dimension `dim`. The last cell may
    /// overhang the upper bound; a span narrower than one cell still gets one.
    pub fn cells_along(&self, dim: usize) -> usize {
        let d = &self.cont_dims[dim];
        let width = 2.0 * self.delta.0[dim];
        let t = (d.upper - d.lower) / width;
        ((t * (1.0 - CELL_COUNT_SLACK)).ceil() as usize).max(1)
    }

    /// Center coordinate of cell `k` along dimension `dim`. When the last
    /// cell overhangs the upper bound far enough that its lattice center
    /// would leave the space, the center clamps to the bound; the ±δ box
    /// still covers the truncated cell because the overhang is under δ.
    pub fn cell_center(&self, dim: usize, k: i64) -> f64 {
        let d = &self.cont_dims[dim];
        (d.lower + self.delta.0[dim] * (2 * k + 1) as f64).min(d.upper)
    }

    /// Cell index holding coordinate `x` along `dim`. Shared cell boundaries
    /// resolve to the lower-index cell; out-of-range values clamp to the edge
    /// cells, so callers must gate on [`OssSpec::in_space`] first.
    pub fn cell_index(&self, dim: usize, x: f64) -> i64 {
        let d = &self.cont_dims[dim];
        let width = 2.0 * self.delta.0[dim];
        let t = (x - d.lower) / width;
        let k = t.ceil() as i64 - 1;
        k.clamp(0, self.cells_along(dim) as i64 - 1)
    }

    /// Grid cell of an admissible point.
    pub fn cell_key_of(&self, p: &StatePoint) -> Result<CellKey> {
        self.check_point(p)?;
        if !self.in_space(p) {
            return Err(Error::OutOfSpace(format!("{:?}", p)));
        }
        let cont = (0..self.n_cont()).map(|i| self.cell_index(i, p.cont[i])).collect();
        Ok(CellKey { cont, disc: p.disc.clone() })
    }

    /// Center point of a grid cell.
    pub fn cell_point(&self, key: &CellKey) -> StatePoint {
        let cont = key
            .cont
            .iter()
            .enumerate()
            .map(|(i, &k)| self.cell_center(i, k))
            .collect();
        StatePoint::new(cont, key.disc.clone())
    }

    /// Replaces each continuous coordinate with the center of its grid cell.
    /// Idempotent: snapping a snapped point returns it unchanged.
    pub fn snap_to_cell(&self, p: &StatePoint) -> Result<StatePoint> {
        Ok(self.cell_point(&self.cell_key_of(p)?))
    }

    /// Projects a point onto the unit cube used by nearest-centroid search:
    /// continuous coordinates scale by their admissible range, discrete
    /// coordinates by their rank among the declared values.
    pub fn normalized(&self, p: &StatePoint) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_cont() + self.n_disc());
        for (i, d) in self.cont_dims.iter().enumerate() {
            out.push((p.cont[i] - d.lower) / (d.upper - d.lower));
        }
        for (j, d) in self.disc_dims.iter().enumerate() {
            let rank = match d.values.binary_search(&p.disc[j]) {
                Ok(r) => r,
                // Undeclared values sort past the top rank; they only appear
                // in queries, never in stored centroids.
                Err(r) => r,
            };
            if d.values.len() > 1 {
                out.push(rank as f64 / (d.values.len() - 1) as f64);
            } else {
                out.push(0.0);
            }
        }
        out
    }
}

/// One grid cell: per-dimension cell indices plus exact discrete coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub cont: Vec<i64>,
    pub disc: Vec<i64>,
}

/// A set of centroids on the spec's grid, one per occupied cell.
#[derive(Debug, Clone)]
pub struct CoveringSet {
    spec: OssSpec,
    centroids: BTreeMap<CentroidId, StatePoint>,
    cells: BTreeMap<CellKey, CentroidId>,
    next_id: u64,
    limit: usize,
}

impl CoveringSet {
    /// An empty covering on the spec's grid.
    pub fn empty(spec: &OssSpec) -> Self {
        CoveringSet {
            spec: spec.clone(),
            centroids: BTreeMap::new(),
            cells: BTreeMap::new(),
            next_id: 0,
            limit: DEFAULT_CENTROID_CAPACITY,
        }
    }

    /// Covers the whole admissible region with one centroid per grid cell.
    pub fn build_initial(spec: &OssSpec) -> Result<Self> {
        Self::build_initial_with_limit(spec, DEFAULT_CENTROID_CAPACITY)
    }

    pub fn build_initial_with_limit(spec: &OssSpec, limit: usize) -> Result<Self> {
        let mut needed: u128 = 1;
        for i in 0..spec.n_cont() {
            needed = needed.saturating_mul(spec.cells_along(i) as u128);
        }
        for d in &spec.disc_dims {
            needed = needed.saturating_mul(d.values.len() as u128);
        }
        if needed > limit as u128 {
            return Err(Error::CapacityExceeded { needed, limit });
        }

        let mut cs = Self::empty(spec);
        cs.limit = limit;
        let n_cont = spec.n_cont();
        let n_disc = spec.n_disc();
        let counts: Vec<usize> = (0..n_cont)
            .map(|i| spec.cells_along(i))
            .chain(spec.disc_dims.iter().map(|d| d.values.len()))
            .collect();
        // Odometer over all dimensions, last dimension fastest.
        let mut idx = vec![0usize; n_cont + n_disc];
        loop {
            let key = CellKey {
                cont: idx[..n_cont].iter().map(|&k| k as i64).collect(),
                disc: idx[n_cont..]
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| spec.disc_dims[j].values[k])
                    .collect(),
            };
            cs.insert_cell(key)?;
            let mut dim = n_cont + n_disc;
            loop {
                if dim == 0 {
                    return Ok(cs);
                }
                dim -= 1;
                idx[dim] += 1;
                if idx[dim] < counts[dim] {
                    break;
                }
                idx[dim] = 0;
            }
        }
    }

    pub fn spec(&self) -> &OssSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    /// Adds a centroid at the center of an unoccupied cell.
    pub fn insert_cell(&mut self, key: CellKey) -> Result<CentroidId> {
        if self.cells.contains_key(&key) {
            return Err(Error::CellOccupied);
        }
        if self.centroids.len() >= self.limit {
            return Err(Error::CapacityExceeded {
                needed: self.centroids.len() as u128 + 1,
                limit: self.limit,
            });
        }
        let id = CentroidId(self.next_id);
        self.next_id += 1;
        self.centroids.insert(id, self.spec.cell_point(&key));
        self.cells.insert(key, id);
        Ok(id)
    }

    /// Snaps an admissible point to its cell and adds a centroid there.
    pub fn insert_point(&mut self, p: &StatePoint) -> Result<CentroidId> {
        let key = self.spec.cell_key_of(p)?;
        self.insert_cell(key)
    }

    /// Removes a centroid, freeing its cell. Returns the removed point.
    pub fn remove(&mut self, id: CentroidId) -> Option<StatePoint> {
        let point = self.centroids.remove(&id)?;
        let key = self
            .spec
            .cell_key_of(&point)
            .expect("stored centroid lies on the grid");
        self.cells.remove(&key);
        Some(point)
    }

    pub fn point_of(&self, id: CentroidId) -> Option<&StatePoint> {
        self.centroids.get(&id)
    }

    pub fn id_at(&self, key: &CellKey) -> Option<CentroidId> {
        self.cells.get(key).copied()
    }

    /// Ids in ascending order.
    pub fn ids(&self) -> Vec<CentroidId> {
        self.centroids.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CentroidId, &StatePoint)> {
        self.centroids.iter().map(|(&id, p)| (id, p))
    }

    /// Occupied cells, the canonical representation for set comparison.
    pub fn cell_keys(&self) -> BTreeSet<CellKey> {
        self.cells.keys().cloned().collect()
    }

    /// Ids of every centroid whose box covers `p`, ascending. A point on a
    /// shared cell boundary is covered by all adjacent centroids present.
    pub fn covering_ids(&self, p: &StatePoint) -> Vec<CentroidId> {
        let spec = &self.spec;
        let n_cont = spec.n_cont();
        let mut cand: Vec<Vec<i64>> = Vec::with_capacity(n_cont);
        for i in 0..n_cont {
            let d = &spec.cont_dims[i];
            let delta = spec.delta.0[i];
            let t = (p.cont[i] - d.lower) / (2.0 * delta);
            // saturating: ±inf coordinates must not wrap the candidate range
            let base = (t.floor() as i64).clamp(i64::MIN + 1, i64::MAX - 1);
            let cells = spec.cells_along(i) as i64;
            let reach = delta * (1.0 + COVER_SLACK);
            let mut ks = Vec::with_capacity(2);
            for k in [base - 1, base, base + 1] {
                if k >= 0 && k < cells && (p.cont[i] - spec.cell_center(i, k)).abs() <= reach {
                    ks.push(k);
                }
            }
            if ks.is_empty() {
                return Vec::new();
            }
            cand.push(ks);
        }

        let mut out = Vec::new();
        let mut pick = vec![0usize; n_cont];
        'product: loop {
            let key = CellKey {
                cont: pick.iter().enumerate().map(|(i, &j)| cand[i][j]).collect(),
                disc: p.disc.clone(),
            };
            if let Some(&id) = self.cells.get(&key) {
                out.push(id);
            }
            let mut dim = n_cont;
            loop {
                if dim == 0 {
                    break 'product;
                }
                dim -= 1;
                pick[dim] += 1;
                if pick[dim] < cand[dim].len() {
                    break;
                }
                pick[dim] = 0;
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether some centroid's box covers `p`. Assumes arity matches.
    pub fn covers(&self, p: &StatePoint) -> bool {
        !self.covering_ids(p).is_empty()
    }

    /// Arity-checked membership query.
    pub fn contains(&self, p: &StatePoint) -> Result<bool> {
        self.spec.check_point(p)?;
        Ok(self.covers(p))
    }

    /// Centroid closest to `p` in normalized squared distance. Ties resolve
    /// to the smallest id.
    pub fn norm_nearest(&self, p: &StatePoint) -> Result<CentroidId> {
        self.spec.check_point(p)?;
        let target = self.spec.normalized(p);
        let mut best: Option<(CentroidId, f64)> = None;
        for (&id, point) in &self.centroids {
            let cand = self.spec.normalized(point);
            let d2: f64 = target
                .iter()
                .zip(&cand)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            match best {
                Some((_, bd)) if d2 >= bd => {}
                _ => best = Some((id, d2)),
            }
        }
        best.map(|(id, _)| id).ok_or(Error::EmptyCovering)
    }
}

impl PartialEq for CoveringSet {
    /// Two coverings are equal when they describe the same region: same spec
    /// and same occupied cells. Ids are bookkeeping and do not participate.
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.cells.len() == other.cells.len()
            && self.cells.keys().zip(other.cells.keys()).all(|(a, b)| a == b)
    }
}

/// Intersection-over-union of two or more cell sets. Errors on fewer than two
/// sets, on keys of mismatched arity, and when every set is empty.
pub fn iou(sets: &[BTreeSet<CellKey>]) -> Result<f64> {
    if sets.len() < 2 {
        return Err(Error::Domain("iou needs at least two sets".into()));
    }
    let mut arity: Option<(usize, usize)> = None;
    for s in sets {
        for key in s {
            let a = (key.cont.len(), key.disc.len());
            match arity {
                None => arity = Some(a),
                Some(expect) if expect != a => {
                    return Err(Error::GridMismatch(format!(
                        "cell arity {:?} vs {:?}",
                        expect, a
                    )));
                }
                _ => {}
            }
        }
    }
    if arity.is_none() {
        return Err(Error::AllSetsEmpty);
    }
    let mut union = sets[0].clone();
    let mut inter = sets[0].clone();
    for s in &sets[1..] {
        union.extend(s.iter().cloned());
        inter = inter.intersection(s).cloned().collect();
    }
    Ok(inter.len() as f64 / union.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_spec(lower: f64, upper: f64, delta: f64) -> OssSpec {
        OssSpec::new(
            vec![ContDim::new("x", lower, upper)],
            vec![],
            DeltaVector(vec![delta]),
            10,
        )
        .unwrap()
    }

    #[test]
    fn initial_covering_exact_division() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        assert_eq!(cs.len(), 2);
        let centers: Vec<f64> = cs.iter().map(|(_, p)| p.cont[0]).collect();
        assert!((centers[0] - 0.25).abs() < 1e-12);
        assert!((centers[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn initial_covering_overhang_still_covers() {
        // span 1.0 over cell width 0.4 needs 3 cells; the union of boxes
        // [c - 0.2, c + 0.2] must cover [0, 1] without gaps
        let spec = line_spec(0.0, 1.0, 0.2);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        assert_eq!(cs.len(), 3);
        let mut intervals: Vec<(f64, f64)> = cs
            .iter()
            .map(|(_, p)| (p.cont[0] - 0.2, p.cont[0] + 0.2))
            .collect();
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert!(intervals[0].0 <= 0.0);
        let mut reach = intervals[0].1;
        for (lo, hi) in &intervals[1..] {
            assert!(*lo <= reach + 1e-12, "gap before {}", lo);
            reach = reach.max(*hi);
        }
        assert!(reach >= 1.0);
    }

    #[test]
    fn initial_covering_crosses_discrete_values() {
        let spec = OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0)],
            vec![DiscDim::new("m", vec![1, 2, 3])],
            DeltaVector(vec![0.25]),
            10,
        )
        .unwrap();
        let cs = CoveringSet::build_initial(&spec).unwrap();
        assert_eq!(cs.len(), 6);
    }

    #[test]
    fn capacity_limit_is_enforced() {
        let spec = line_spec(0.0, 1.0, 1e-9);
        match CoveringSet::build_initial(&spec) {
            Err(Error::CapacityExceeded { needed, .. }) => assert!(needed > 10_000_000),
            other => panic!("expected capacity error, got {:?}", other),
        }
    }

    #[test]
    fn contains_matches_box_and_discrete_coordinates() {
        let spec = OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0)],
            vec![DiscDim::new("m", vec![1, 2])],
            DeltaVector(vec![0.2]),
            10,
        )
        .unwrap();
        let mut cs = CoveringSet::empty(&spec);
        cs.insert_point(&StatePoint::new(vec![0.2], vec![1])).unwrap();
        assert!(cs.contains(&StatePoint::new(vec![0.35], vec![1])).unwrap());
        assert!(!cs.contains(&StatePoint::new(vec![0.35], vec![2])).unwrap());
        assert!(!cs.contains(&StatePoint::new(vec![0.41], vec![1])).unwrap());
        assert!(cs
            .contains(&StatePoint::new(vec![0.2, 0.3], vec![1]))
            .is_err());
    }

    #[test]
    fn boundary_point_is_covered_by_both_neighbors() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        let ids = cs.covering_ids(&StatePoint::continuous(vec![0.5]));
        assert_eq!(ids.len(), 2);
        assert!(cs.covers(&StatePoint::continuous(vec![0.5])));
    }

    #[test]
    fn snap_examples() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let snap = |x: f64| spec.snap_to_cell(&StatePoint::continuous(vec![x])).unwrap().cont[0];
        assert!((snap(0.1) - 0.25).abs() < 1e-12);
        // a boundary point belongs to the lower cell
        assert!((snap(0.5) - 0.25).abs() < 1e-12);
        // idempotent
        assert_eq!(snap(snap(0.6)), snap(0.6));
        assert!(spec
            .snap_to_cell(&StatePoint::continuous(vec![1.5]))
            .is_err());
    }

    #[test]
    fn snap_is_idempotent_and_stays_in_cell_across_grid() {
        let spec = line_spec(-1.0, 2.0, 0.07);
        let n = 5000;
        for i in 0..=n {
            let x = -1.0 + 3.0 * i as f64 / n as f64;
            let p = StatePoint::continuous(vec![x]);
            let s = spec.snap_to_cell(&p).unwrap();
            let s2 = spec.snap_to_cell(&s).unwrap();
            assert_eq!(s, s2, "snap not idempotent at {}", x);
            assert!((x - s.cont[0]).abs() <= spec.delta.0[0] + 1e-12);
            assert_eq!(spec.cell_key_of(&p).unwrap(), spec.cell_key_of(&s).unwrap());
        }
    }

    #[test]
    fn full_grid_covers_dense_samples() {
        let spec = OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0), ContDim::new("y", -2.0, 0.5)],
            vec![],
            DeltaVector(vec![0.2, 0.3]),
            10,
        )
        .unwrap();
        let cs = CoveringSet::build_initial(&spec).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let p = StatePoint::continuous(vec![
                    i as f64 / 40.0,
                    -2.0 + 2.5 * j as f64 / 40.0,
                ]);
                assert!(cs.covers(&p), "uncovered admissible point {:?}", p);
            }
        }
    }

    #[test]
    fn norm_nearest_balances_scaled_dimensions() {
        // dims [0,2] x [0,10]; centroids (0,5) and (1,0); query (1,5):
        // normalized distances tie at 0.5, so the smaller id wins
        let spec = OssSpec::new(
            vec![ContDim::new("a", 0.0, 2.0), ContDim::new("b", 0.0, 10.0)],
            vec![],
            DeltaVector(vec![0.5, 2.5]),
            10,
        )
        .unwrap();
        let mut cs = CoveringSet::empty(&spec);
        let c1 = cs.insert_point(&StatePoint::continuous(vec![0.1, 5.0])).unwrap();
        let _c2 = cs.insert_point(&StatePoint::continuous(vec![1.1, 0.1])).unwrap();
        let got = cs.norm_nearest(&StatePoint::continuous(vec![1.0, 5.0])).unwrap();
        assert_eq!(got, c1);
    }

    #[test]
    fn norm_nearest_is_scale_invariant() {
        // the same layout measured in meters or millimeters picks the same
        // centroid, because distances normalize by each admissible range
        let build = |scale: f64| {
            let spec = OssSpec::new(
                vec![
                    ContDim::new("a", 0.0, 2.0 * scale),
                    ContDim::new("b", 0.0, 10.0),
                ],
                vec![],
                DeltaVector(vec![0.1 * scale, 0.5]),
                10,
            )
            .unwrap();
            let mut cs = CoveringSet::empty(&spec);
            for (a, b) in [(0.31, 1.3), (1.77, 8.1), (0.93, 4.2), (1.21, 6.6)] {
                cs.insert_point(&StatePoint::continuous(vec![a * scale, b]))
                    .unwrap();
            }
            cs
        };
        let base = build(1.0);
        let scaled = build(1000.0);
        for (qa, qb) in [(0.4, 2.0), (1.5, 9.0), (1.0, 5.0), (0.05, 9.9)] {
            let n1 = base.norm_nearest(&StatePoint::continuous(vec![qa, qb])).unwrap();
            let n2 = scaled
                .norm_nearest(&StatePoint::continuous(vec![qa * 1000.0, qb]))
                .unwrap();
            assert_eq!(n1, n2);
        }
    }

    #[test]
    fn norm_nearest_counts_discrete_rank_distance() {
        let spec = OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0)],
            vec![DiscDim::new("m", vec![1, 2, 5])],
            DeltaVector(vec![0.1]),
            10,
        )
        .unwrap();
        let mut cs = CoveringSet::empty(&spec);
        // same continuous cell, different modes: rank distance decides
        let near = cs.insert_point(&StatePoint::new(vec![0.5], vec![2])).unwrap();
        let far = cs.insert_point(&StatePoint::new(vec![0.5], vec![5])).unwrap();
        let got = cs.norm_nearest(&StatePoint::new(vec![0.5], vec![1])).unwrap();
        assert_eq!(got, near);
        assert_ne!(got, far);
    }

    #[test]
    fn norm_nearest_on_empty_covering_errs() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let cs = CoveringSet::empty(&spec);
        assert!(matches!(
            cs.norm_nearest(&StatePoint::continuous(vec![0.5])),
            Err(Error::EmptyCovering)
        ));
    }

    #[test]
    fn remove_frees_the_cell() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let mut cs = CoveringSet::build_initial(&spec).unwrap();
        let id = cs.covering_ids(&StatePoint::continuous(vec![0.3]))[0];
        assert!(cs.remove(id).is_some());
        assert!(!cs.covers(&StatePoint::continuous(vec![0.3])));
        assert!(cs.remove(id).is_none());
        // the cell can be reoccupied under a fresh id
        let id2 = cs.insert_point(&StatePoint::continuous(vec![0.3])).unwrap();
        assert_ne!(id, id2);
        assert!(cs.covers(&StatePoint::continuous(vec![0.3])));
    }

    #[test]
    fn iou_examples() {
        let key = |k: i64| CellKey { cont: vec![k], disc: vec![] };
        let a: BTreeSet<CellKey> = [key(0), key(1), key(2)].into();
        let b: BTreeSet<CellKey> = [key(1), key(2), key(3)].into();
        assert!((iou(&[a.clone(), b.clone()]).unwrap() - 0.5).abs() < 1e-12);

        let identical = vec![a.clone(); 5];
        assert_eq!(iou(&identical).unwrap(), 1.0);

        let disjoint: BTreeSet<CellKey> = [key(7), key(8)].into();
        assert_eq!(iou(&[a.clone(), disjoint]).unwrap(), 0.0);

        assert!(matches!(iou(&[a.clone()]), Err(Error::Domain(_))));
        assert!(matches!(
            iou(&[BTreeSet::new(), BTreeSet::new()]),
            Err(Error::AllSetsEmpty)
        ));
        let wrong_arity: BTreeSet<CellKey> =
            [CellKey { cont: vec![0, 0], disc: vec![] }].into();
        assert!(matches!(iou(&[a, wrong_arity]), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn covering_equality_ignores_ids() {
        let spec = line_spec(0.0, 1.0, 0.25);
        let a = CoveringSet::build_initial(&spec).unwrap();
        let mut b = CoveringSet::build_initial(&spec).unwrap();
        let id = b.ids()[0];
        let p = b.point_of(id).unwrap().clone();
        b.remove(id);
        assert_ne!(a, b);
        b.insert_point(&p).unwrap();
        assert_eq!(a, b);
    }
}
