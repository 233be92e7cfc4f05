//! Diagonal affine graph maps and the piecemealings built from them.
//!
//! A map `(a, d, e, f)` sends the point `(x, y)` to `(a x + e, d y + f)`, so
//! it carries the graph of `y` over `[x_0, x_n]` onto the graph of
//! `x ↦ d·y((x − e)/a) + f` over one sub-interval. A piecemealing is an
//! ordered list of such maps whose images tile the domain left to right.

use crate::error::{Error, Result};
use crate::funcrep::{Grid, Interval, SegmentedFunction};
use crate::number::{format_rational, Field, Number, Rational};

/// Relative tolerance used to decide that the images tile the domain, float
/// mode only.
pub const TILING_TOL: f64 = 1e-12;
/// Allowed `e_i` discrepancy, relative to the domain width, float mode only.
pub const SHIFT_TOL: f64 = 1e-9;
/// Back-mapped arguments may overshoot the domain by this much (relative to
/// its width) before `apply` reports an error.
pub const OVERSHOOT_TOL: f64 = 1e-12;

/// Entries of one diagonal map.
#[derive(Debug, Clone, PartialEq)]
pub struct Coeffs<T> {
    pub a: T,
    pub d: T,
    pub e: T,
    pub f: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineGraphMap {
    coeffs: Coeffs<f64>,
    exact: Option<Coeffs<Rational>>,
}

impl AffineGraphMap {
    pub fn new(a: f64, d: f64, e: f64, f: f64) -> Self {
        AffineGraphMap {
            coeffs: Coeffs { a, d, e, f },
            exact: None,
        }
    }

    pub fn exact(a: Rational, d: Rational, e: Rational, f: Rational) -> Self {
        let coeffs = Coeffs {
            a: a.to_f64(),
            d: d.to_f64(),
            e: e.to_f64(),
            f: f.to_f64(),
        };
        AffineGraphMap {
            coeffs,
            exact: Some(Coeffs { a, d, e, f }),
        }
    }

    /// Exact when all four entries are.
    pub fn from_numbers(a: &Number, d: &Number, e: &Number, f: &Number) -> Self {
        match (a.exact_value(), d.exact_value(), e.exact_value(), f.exact_value()) {
            (Some(a), Some(d), Some(e), Some(f)) => {
                AffineGraphMap::exact(a.clone(), d.clone(), e.clone(), f.clone())
            }
            _ => AffineGraphMap::new(a.value(), d.value(), e.value(), f.value()),
        }
    }

    pub fn a(&self) -> f64 {
        self.coeffs.a
    }

    pub fn d(&self) -> f64 {
        self.coeffs.d
    }

    pub fn e(&self) -> f64 {
        self.coeffs.e
    }

    pub fn f(&self) -> f64 {
        self.coeffs.f
    }

    pub fn coeffs(&self) -> &Coeffs<f64> {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> Option<&Coeffs<Rational>> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `(a x + e, d y + f)`.
    pub fn apply_point(&self, x: f64, y: f64) -> (f64, f64) {
        let c = &self.coeffs;
        (c.a * x + c.e, c.d * y + c.f)
    }

    /// The abscissa this map sends to `x`.
    pub fn preimage(&self, x: f64) -> f64 {
        (x - self.coeffs.e) / self.coeffs.a
    }
}

/// `{a x + e : x ∈ domain}` as an ordered interval.
pub fn image_interval(map: &AffineGraphMap, domain: Interval) -> Result<Interval> {
    let p = map.a() * domain.lo() + map.e();
    let q = map.a() * domain.hi() + map.e();
    Interval::new(p.min(q), p.max(q))
}

/// Domain, breakpoints and map entries in one number type. The boundary
/// system is written against this.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout<T> {
    pub lo: T,
    pub hi: T,
    pub breakpoints: Vec<T>,
    pub maps: Vec<Coeffs<T>>,
}

impl<T: Field> Layout<T> {
    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    /// `x_i − x_{i−1}` for `i = 1..n`.
    pub fn widths(&self) -> Vec<T> {
        self.breakpoints
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .collect()
    }
}

/// Derives `x_0 < … < x_n` from the map entries and checks that every shift
/// agrees with the tiling (temporal-preserving maps send `x_n` to `x_i`,
/// reversing ones send `x_0` to `x_i`).
pub fn derive_breakpoints<T: Field>(lo: &T, hi: &T, maps: &[Coeffs<T>]) -> Result<Vec<T>> {
    if maps.is_empty() {
        return Err(Error::EmptyPiecemealing);
    }
    if let Some(index) = maps.iter().position(|m| m.a.is_zero()) {
        return Err(Error::DegenerateMap { index });
    }
    let total = maps.iter().fold(T::zero(), |acc, m| acc + m.a.abs());
    if !(total.clone() - T::one()).is_zero_within(TILING_TOL) {
        return Err(Error::Tiling {
            sum: total.to_string(),
        });
    }
    let width = hi.clone() - lo.clone();
    let mut breakpoints = Vec::with_capacity(maps.len() + 1);
    breakpoints.push(lo.clone());
    let mut x = lo.clone();
    for (i, m) in maps.iter().enumerate() {
        x = if i + 1 == maps.len() {
            hi.clone()
        } else {
            x + m.a.abs() * width.clone()
        };
        let anchor = if m.a.is_positive() { hi } else { lo };
        let expected = x.clone() - m.a.clone() * anchor.clone();
        let scale = SHIFT_TOL * width.to_f64().abs();
        if !(m.e.clone() - expected.clone()).is_zero_within(scale) {
            return Err(Error::ShiftMismatch {
                index: i,
                actual: m.e.to_string(),
                expected: expected.to_string(),
            });
        }
        breakpoints.push(x.clone());
    }
    Ok(breakpoints)
}

/// A validated list of maps tiling `[x_0, x_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecemealing {
    maps: Vec<AffineGraphMap>,
    float: Layout<f64>,
    exact: Option<Layout<Rational>>,
}

impl Piecemealing {
    /// Float-mode validation. Exact tags on the maps are kept but not used.
    pub fn validate(domain: Interval, maps: Vec<AffineGraphMap>) -> Result<Self> {
        let coeffs: Vec<Coeffs<f64>> = maps.iter().map(|m| m.coeffs.clone()).collect();
        let breakpoints = derive_breakpoints(&domain.lo(), &domain.hi(), &coeffs)?;
        Ok(Piecemealing {
            maps,
            float: Layout {
                lo: domain.lo(),
                hi: domain.hi(),
                breakpoints,
                maps: coeffs,
            },
            exact: None,
        })
    }

    /// Exact validation; every map must carry rational entries.
    pub fn validate_exact(lo: Rational, hi: Rational, maps: Vec<AffineGraphMap>) -> Result<Self> {
        let coeffs = maps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.exact
                    .clone()
                    .ok_or_else(|| Error::MissingExact(format!("map {i} has non-rational entries")))
            })
            .collect::<Result<Vec<_>>>()?;
        if lo >= hi {
            return Err(Error::InvalidInterval {
                lo: lo.to_f64(),
                hi: hi.to_f64(),
            });
        }
        let breakpoints = derive_breakpoints(&lo, &hi, &coeffs)?;
        let float = Layout {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
            breakpoints: breakpoints.iter().map(Field::to_f64).collect(),
            maps: maps.iter().map(|m| m.coeffs.clone()).collect(),
        };
        Ok(Piecemealing {
            maps,
            float,
            exact: Some(Layout {
                lo,
                hi,
                breakpoints,
                maps: coeffs,
            }),
        })
    }

    /// Exact whenever the endpoints and all map entries are rational,
    /// float otherwise. Rational input that misses the tiling or a shift
    /// only by rounding (decimals such as `0.3333333333333333`) is accepted
    /// in float mode; if float mode rejects it too, the exact error is
    /// reported.
    pub fn validate_numbers(lo: &Number, hi: &Number, maps: Vec<AffineGraphMap>) -> Result<Self> {
        match (lo.exact_value(), hi.exact_value()) {
            (Some(l), Some(h)) if maps.iter().all(AffineGraphMap::is_exact) => {
                match Piecemealing::validate_exact(l.clone(), h.clone(), maps.clone()) {
                    Err(e @ (Error::Tiling { .. } | Error::ShiftMismatch { .. })) => {
                        Piecemealing::validate(Interval::new(lo.value(), hi.value())?, maps).map_err(|_| e)
                    }
                    other => other,
                }
            }
            _ => Piecemealing::validate(Interval::new(lo.value(), hi.value())?, maps),
        }
    }

    pub fn maps(&self) -> &[AffineGraphMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.float.lo, self.float.hi).expect("validated domain")
    }

    pub fn width(&self) -> f64 {
        self.float.hi - self.float.lo
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.float.breakpoints
    }

    pub fn float_layout(&self) -> &Layout<f64> {
        &self.float
    }

    pub fn exact_layout(&self) -> Option<&Layout<Rational>> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact breakpoints as `"p/q"` strings when available.
    pub fn breakpoint_strings(&self) -> Vec<String> {
        match &self.exact {
            Some(l) => l.breakpoints.iter().map(format_rational).collect(),
            None => self.float.breakpoints.iter().map(|b| b.to_string()).collect(),
        }
    }

    /// Uniform grid with `m` sub-intervals on every piece.
    pub fn grid(&self, m: usize) -> Result<Grid> {
        Grid::uniform(self.float.breakpoints.clone(), m)
    }

    /// Branch `i` of `P(y)` evaluated pointwise: `d_i y((x − e_i)/a_i) + f_i`.
    pub fn branch_value(&self, i: usize, y: impl Fn(f64) -> f64, x: f64) -> f64 {
        let c = &self.float.maps[i];
        c.d * y((x - c.e) / c.a) + c.f
    }

    /// `P(y)` sampled on this piecemealing's breakpoints.
    ///
    /// `y`'s breakpoints must include `x_0, …, x_n`; piece `i` of the result
    /// gets as many sub-intervals as `y` has between `x_{i−1}` and `x_i`.
    pub fn apply(&self, y: &SegmentedFunction) -> Result<SegmentedFunction> {
        let w = self.width();
        let close = |p: f64, q: f64| (p - q).abs() <= OVERSHOOT_TOL * w;
        let yb = y.breakpoints();
        if !close(yb[0], self.float.lo) || !close(*yb.last().unwrap(), self.float.hi) {
            return Err(Error::DomainMismatch(format!(
                "function lives on [{}, {}], piecemealing on [{}, {}]",
                yb[0],
                yb.last().unwrap(),
                self.float.lo,
                self.float.hi
            )));
        }
        let mut intervals = Vec::with_capacity(self.len());
        let mut cursor = 0usize;
        for &x_i in &self.float.breakpoints[1..] {
            let mut count = 0;
            while cursor + 1 < yb.len() && yb[cursor + 1] < x_i && !close(yb[cursor + 1], x_i) {
                count += y.grid().intervals()[cursor];
                cursor += 1;
            }
            if cursor + 1 >= yb.len() || !close(yb[cursor + 1], x_i) {
                return Err(Error::DomainMismatch(format!(
                    "breakpoint {x_i} is not a breakpoint of the function's grid"
                )));
            }
            count += y.grid().intervals()[cursor];
            cursor += 1;
            intervals.push(count);
        }
        let grid = Grid::new(self.float.breakpoints.clone(), intervals)?;
        let (lo, hi) = (self.float.lo, self.float.hi);
        let slack = OVERSHOOT_TOL * w;
        let segments = (0..self.len())
            .map(|i| {
                let c = &self.float.maps[i];
                grid.nodes(i)
                    .map(|x| {
                        let mut u = (x - c.e) / c.a;
                        if u < lo || u > hi {
                            if u < lo - slack || u > hi + slack {
                                return Err(Error::ArgumentOutOfRange { index: i, x, u });
                            }
                            u = u.clamp(lo, hi);
                        }
                        Ok(c.d * y.eval(u)? + c.f)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SegmentedFunction::new(grid, segments)
    }
}
