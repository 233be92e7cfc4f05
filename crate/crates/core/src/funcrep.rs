//! Real functions on an interval, stored as per-segment uniform sample grids.
//!
//! Each segment `[b_{j-1}, b_j]` carries `M_j + 1` samples at uniformly spaced
//! nodes, both endpoints included. Adjacent segments each store their own
//! value at the shared breakpoint, so jump discontinuities are representable.
//! Between nodes the function is linear, which makes the trapezoid rule exact
//! on the representation.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Breakpoints plus the number of sub-intervals in each segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    breakpoints: Vec<f64>,
    intervals: Vec<usize>,
}

impl Grid {
    pub fn new(breakpoints: Vec<f64>, intervals: Vec<usize>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidGrid("need at least two breakpoints".into()));
        }
        if intervals.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidGrid(format!(
                "{} breakpoints but {} segment sizes",
                breakpoints.len(),
                intervals.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidGrid("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("breakpoints must be strictly increasing".into()));
        }
        if let Some(j) = intervals.iter().position(|&m| m < 2) {
            return Err(Error::InvalidGrid(format!("segment {j} has fewer than 2 sub-intervals")));
        }
        Ok(Grid {
            breakpoints,
            intervals,
        })
    }

    /// Same sub-interval count `m` on every segment.
    pub fn uniform(breakpoints: Vec<f64>, m: usize) -> Result<Self> {
        let n = breakpoints.len().saturating_sub(1);
        Grid::new(breakpoints, vec![m; n])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn intervals(&self) -> &[usize] {
        &self.intervals
    }

    pub fn segment_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.breakpoints[0],
            hi: *self.breakpoints.last().unwrap(),
        }
    }

    /// Node spacing of segment `j`.
    pub fn step(&self, j: usize) -> f64 {
        (self.breakpoints[j + 1] - self.breakpoints[j]) / self.intervals[j] as f64
    }

    /// Position of node `k` in segment `j`; the last node is the breakpoint
    /// itself, not an accumulated sum.
    pub fn node(&self, j: usize, k: usize) -> f64 {
        let (lo, hi) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let m = self.intervals[j];
        if k == m {
            hi
        } else {
            lo + (hi - lo) * (k as f64 / m as f64)
        }
    }

    pub fn nodes(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals[j]).map(move |k| self.node(j, k))
    }
}

/// Numeric function on `[b_0, b_n]`, linear between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedFunction {
    grid: Grid,
    segments: Vec<Vec<f64>>,
}

impl SegmentedFunction {
    pub fn new(grid: Grid, segments: Vec<Vec<f64>>) -> Result<Self> {
        if segments.len() != grid.segment_count() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {} segments, got {} sample arrays",
                grid.segment_count(),
                segments.len()
            )));
        }
        for (j, (s, &m)) in segments.iter().zip(&grid.intervals).enumerate() {
            if s.len() != m + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "segment {j} expects {} samples, got {}",
                    m + 1,
                    s.len()
                )));
            }
            if let Some(k) = s.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { segment: j, node: k });
            }
        }
        Ok(SegmentedFunction { grid, segments })
    }

    /// Samples `eval` at every node of `grid`.
    pub fn sample<F>(grid: &Grid, mut eval: F) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        Self::try_sample(grid, |x| Ok(eval(x)))
    }

    /// Like [`sample`](Self::sample) but the evaluator may fail.
    pub fn try_sample<F>(grid: &Grid, mut eval: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let segments = (0..grid.segment_count())
            .map(|j| grid.nodes(j).map(&mut eval).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SegmentedFunction::new(grid.clone(), segments)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        let segments = grid.intervals.iter().map(|&m| vec![c; m + 1]).collect();
        SegmentedFunction {
            grid: grid.clone(),
            segments,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.grid.breakpoints
    }

    pub fn domain(&self) -> Interval {
        self.grid.domain()
    }

    pub fn segments(&self) -> &[Vec<f64>] {
        &self.segments
    }

    pub fn segment(&self, j: usize) -> &[f64] {
        &self.segments[j]
    }

    pub fn first_value(&self) -> f64 {
        self.segments[0][0]
    }

    pub fn last_value(&self) -> f64 {
        *self.segments.last().unwrap().last().unwrap()
    }

    /// Every `(x, value)` pair, segment by segment. Internal breakpoints
    /// appear twice (end of one segment, start of the next).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.segments.len())
            .flat_map(move |j| self.grid.nodes(j).zip(self.segments[j].iter().copied()))
    }

    pub fn max_abs(&self) -> f64 {
        self.segments
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn map(&self, mut op: impl FnMut(f64, f64) -> f64) -> Self {
        let segments = (0..self.segments.len())
            .map(|j| {
                self.grid
                    .nodes(j)
                    .zip(&self.segments[j])
                    .map(|(x, &v)| op(x, v))
                    .collect()
            })
            .collect();
        SegmentedFunction {
            grid: self.grid.clone(),
            segments,
        }
    }

    /// Node-wise `self + scale * other` on an identical grid.
    pub fn add_scaled(&self, other: &SegmentedFunction, scale: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let segments = self
            .segments
            .iter()
            .zip(&other.segments)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + scale * y).collect())
            .collect();
        Ok(SegmentedFunction {
            grid: self.grid.clone(),
            segments,
        })
    }

    /// True when left and right values agree within `tol` at every internal
    /// breakpoint.
    pub fn is_continuous(&self, tol: f64) -> bool {
        self.segments
            .windows(2)
            .all(|w| (w[0].last().unwrap() - w[1][0]).abs() <= tol)
    }

    /// Linear interpolation; an internal breakpoint takes the left segment's
    /// endpoint value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let b = &self.grid.breakpoints;
        let (lo, hi) = (b[0], *b.last().unwrap());
        if !(lo <= x && x <= hi) {
            return Err(Error::Domain { x, lo, hi });
        }
        let j = b.partition_point(|&bp| bp < x).saturating_sub(1);
        Ok(self.eval_in_segment(j, x))
    }

    fn eval_in_segment(&self, j: usize, x: f64) -> f64 {
        let s = &self.segments[j];
        let m = self.grid.intervals[j];
        let (lo, hi) = (self.grid.breakpoints[j], self.grid.breakpoints[j + 1]);
        let t = ((x - lo) / (hi - lo) * m as f64).clamp(0.0, m as f64);
        let k = (t.floor() as usize).min(m - 1);
        let frac = t - k as f64;
        s[k] + frac * (s[k + 1] - s[k])
    }

    /// Composite trapezoid rule over each segment.
    pub fn integrate(&self) -> f64 {
        (0..self.segments.len()).map(|j| self.segment_integral(j)).sum()
    }

    pub fn segment_integral(&self, j: usize) -> f64 {
        let s = &self.segments[j];
        let interior: f64 = s[1..s.len() - 1].iter().sum();
        self.grid.step(j) * (interior + 0.5 * (s[0] + s[s.len() - 1]))
    }

    /// `C + ∫_{b_0}^{x} f` at every node by cumulative trapezoid. The result
    /// is continuous: each segment starts where the previous one ended.
    pub fn integrate_prefix(&self, c: f64) -> SegmentedFunction {
        let mut running = c;
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let half_h = 0.5 * self.grid.step(j);
                let mut out = Vec::with_capacity(s.len());
                out.push(running);
                for w in s.windows(2) {
                    running += half_h * (w[0] + w[1]);
                    out.push(running);
                }
                out
            })
            .collect();
        SegmentedFunction {
            grid: self.grid.clone(),
            segments,
        }
    }

    /// Largest node-wise absolute difference, both sides of every breakpoint
    /// included.
    pub fn sup_distance(&self, other: &SegmentedFunction) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .segments
            .iter()
            .zip(&other.segments)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs())))
    }

    fn check_same_shape(&self, other: &SegmentedFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch(
                "functions are sampled on different grids".into(),
            ));
        }
        Ok(())
    }

    /// CSV with header `x,y`, one row per node, 17 significant digits. A
    /// shared breakpoint is written once when both sides agree bit-for-bit and
    /// twice otherwise.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y")?;
        for (j, s) in self.segments.iter().enumerate() {
            let skip_first = j > 0 && self.segments[j - 1].last() == s.first();
            for (k, (x, v)) in self.grid.nodes(j).zip(s).enumerate() {
                if k == 0 && skip_first {
                    continue;
                }
                writeln!(out, "{},{}", fmt17(x), fmt17(*v))?;
            }
        }
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv) for a known grid.
    pub fn read_csv<R: BufRead>(grid: &Grid, input: R) -> Result<Self> {
        let rows = read_csv_rows(input)?;
        let mut segments = Vec::with_capacity(grid.segment_count());
        let mut pos = 0usize;
        for j in 0..grid.segment_count() {
            let m = grid.intervals[j];
            let mut seg = Vec::with_capacity(m + 1);
            if j > 0 {
                let shared: &Vec<f64> = &segments[j - 1];
                let left = *shared.last().unwrap();
                // a second row at the breakpoint carries the right-hand value
                let bp = grid.breakpoints[j];
                if pos < rows.len() && rows[pos].0 == bp {
                    seg.push(rows[pos].1);
                    pos += 1;
                } else {
                    seg.push(left);
                }
            }
            while seg.len() < m + 1 {
                let (x, v) = *rows.get(pos).ok_or_else(|| {
                    Error::Parse(format!("CSV ended early in segment {j}"))
                })?;
                let expected = grid.node(j, seg.len());
                if (x - expected).abs() > 1e-12 * grid.domain().width() {
                    return Err(Error::Parse(format!(
                        "CSV row {} has x = {x}, grid node is {expected}",
                        pos + 2
                    )));
                }
                seg.push(v);
                pos += 1;
            }
            segments.push(seg);
        }
        if pos != rows.len() {
            return Err(Error::Parse(format!(
                "CSV has {} rows beyond the grid",
                rows.len() - pos
            )));
        }
        SegmentedFunction::new(grid.clone(), segments)
    }
}

/// `{:.16e}` gives 17 significant digits, enough to round-trip any binary64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses an `x,y` CSV body (header required) into rows.
pub fn read_csv_rows<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "x,y" => {}
        _ => return Err(Error::Parse("CSV must start with the header x,y".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad CSV row {}: {line:?}", i + 2)))
        };
        let mut parts = line.split(',');
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        rows.push((x, y));
    }
    Ok(rows)
}
