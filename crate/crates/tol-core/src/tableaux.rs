//! Field tableaux: semistandard Young tableaux that additionally increase
//! strictly along southwest diagonals (steps `(r, c) → (r+1, c−1)`) and
//! carry pinned first columns, their exponent vectors and signs, and the
//! affine bijection between index chains and tableau pairs.
//!
//! For winding index `𝔡 > 0` the shapes are `μ₁ = (d, d−1, …, d₀+1)` and
//! `μ₂ = (d−d₀, …, 1)`; for `𝔡 < 0` both gain `|𝔡|` leading rows of width
//! `d+1`, degenerating to `μ₁ = μ₂ = ((d+1)^{d₂})` at `𝔡 = −d₂`. A pair
//! `(𝔵, 𝔶)` contributes the monomial
//! `∏_{i≤d₀} λ_i^{-c_i} ∏_{i>d₀} λ_i^{c_i}` with sign
//! `ẑ = ŝgn(X̂)·ŝgn(Ŷ)` against the noise minor `det(E_∞[X̂; Ŷ])`.

use crate::expansion::{placing_parity, stable_sets, IndexChain};
use crate::roots::RegionClass;
use crate::symbol::Symbol;
use crate::{Error, Result, C64};

/// Default ceiling on enumerated pairs.
pub const DEFAULT_PAIR_BUDGET: usize = 10_000_000;

/// A Young tableau with positive integer cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    /// Row-major cells; `rows[r][c]`, both 0-based.
    pub rows: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Self {
        Tableau { rows }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.len()).collect()
    }

    /// 1-based cell access `x_{i,j}`.
    pub fn cell(&self, i: usize, j: usize) -> u32 {
        self.rows[i - 1][j - 1]
    }

    /// Validate shape, SSYT monotonicity (rows weak, columns strict),
    /// southwest-diagonal strictness, and the pinning `x_{i,1} = i` for
    /// `i ∈ [pinned]`.
    pub fn validate(&self, shape: &[usize], pinned: usize) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::Domain(format!(
                "tableau shape {:?} does not match {:?}",
                self.shape(),
                shape
            )));
        }
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v < 1 {
                    return Err(Error::Domain("tableau cells must be positive".into()));
                }
                if c > 0 && row[c - 1] > v {
                    return Err(Error::Domain(format!(
                        "row {} not weakly increasing at column {}",
                        r + 1,
                        c + 1
                    )));
                }
                if r > 0 && self.rows[r - 1].len() > c && self.rows[r - 1][c] >= v {
                    return Err(Error::Domain(format!(
                        "column {} not strictly increasing at row {}",
                        c + 1,
                        r + 1
                    )));
                }
                if r > 0 && self.rows[r - 1].len() > c + 1 && self.rows[r - 1][c + 1] >= v {
                    return Err(Error::Domain(format!(
                        "southwest diagonal not strict into cell ({}, {})",
                        r + 1,
                        c + 1
                    )));
                }
            }
        }
        for i in 1..=pinned {
            if self.cell(i, 1) != i as u32 {
                return Err(Error::Domain(format!(
                    "first-column pinning violated: x_{{{i},1}} = {} ≠ {i}",
                    self.cell(i, 1)
                )));
            }
        }
        Ok(())
    }
}

/// A pair of field tableaux with its exponents, index sets, and sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldTableauPair {
    pub x: Tableau,
    pub y: Tableau,
    /// Exponents `c_i(𝔵, 𝔶)`, length `d`.
    pub c: Vec<u32>,
    /// Row index set `X̂` (ascending), size `|𝔡|`.
    pub xhat: Vec<u32>,
    /// Column index set `Ŷ` (ascending), size `|𝔡|`.
    pub yhat: Vec<u32>,
    /// `ẑ = ŝgn(X̂)·ŝgn(Ŷ) ∈ {−1, +1}`.
    pub sign: i8,
    /// The winding index the pair belongs to.
    pub wind: i64,
}

impl FieldTableauPair {
    /// One-line debug dump: rows separated by `|`, cells by spaces, the two
    /// tableaux separated by ` / `.
    pub fn dump_line(&self) -> String {
        let fmt = |t: &Tableau| {
            t.rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("|")
        };
        format!("{} / {}", fmt(&self.x), fmt(&self.y))
    }
}

/// The two shapes `(μ₁, μ₂)` for winding index `𝔡 ≠ 0`.
pub fn pair_shapes(s: &Symbol, wind: i64) -> Result<(Vec<usize>, Vec<usize>)> {
    let d = s.d() as usize;
    let d1 = s.d1();
    let d2 = s.d2();
    if wind == 0 || wind < -d2 || wind > d1 {
        return Err(Error::Config(format!(
            "winding index {wind} outside [-d2, d1] \\ {{0}}"
        )));
    }
    let d0 = (d1 - wind) as usize;
    if wind > 0 {
        let mu1: Vec<usize> = (d0 + 1..=d).rev().collect();
        let mu2: Vec<usize> = (1..=d - d0).rev().collect();
        Ok((mu1, mu2))
    } else {
        let w = (-wind) as usize;
        let mut mu1: Vec<usize> = vec![d + 1; w];
        mu1.extend((d0 + 1..=d).rev());
        let mut mu2: Vec<usize> = vec![d + 1; w];
        mu2.extend((1..=(d2 + wind) as usize).rev());
        Ok((mu1, mu2))
    }
}

/// The exponent vector `c(𝔵, 𝔶)` straight from the defining sums.
pub fn exponents(s: &Symbol, x: &Tableau, y: &Tableau, wind: i64) -> Vec<i64> {
    let d = s.d() as usize;
    let d1 = s.d1();
    let d2 = s.d2();
    let d0 = (d1 - wind) as usize;
    let mut c = vec![0i64; d];
    if wind > 0 {
        for i in 1..=d0 {
            let mut acc = 0i64;
            for j in 1..=(d - d0) {
                acc += x.cell(j, i + 1) as i64 - x.cell(j, i) as i64 + 1;
            }
            c[i - 1] = acc;
        }
        for i in (d0 + 1)..=d {
            let mut acc = y.cell(1, d + 1 - i) as i64 + x.cell(1, i) as i64 - 1 - d2 - wind;
            for j in 2..=(i - d0) {
                acc += y.cell(j, d + 1 - i) as i64 - y.cell(j - 1, d + 2 - i) as i64;
            }
            for j in 2..=(d + 1 - i) {
                acc += x.cell(j, i) as i64 - x.cell(j - 1, i + 1) as i64;
            }
            c[i - 1] = acc;
        }
    } else {
        let w = (-wind) as usize;
        for i in 1..=d0 {
            let mut acc = 0i64;
            for j in 1..=(d2 as usize) {
                acc += x.cell(j, i + 1) as i64 - x.cell(j, i) as i64 + 1;
            }
            for j in 1..=w {
                acc += y.cell(j, d + 2 - i) as i64 - y.cell(j, d + 1 - i) as i64 + 1;
            }
            c[i - 1] = acc;
        }
        for i in (d0 + 1)..=d {
            let mut acc = y.cell(1, d + 1 - i) as i64 + x.cell(1, i) as i64 - 1 - d2 + wind;
            for j in 2..=((i as i64 - d1).max(0) as usize) {
                acc += y.cell(j, d + 1 - i) as i64 - y.cell(j - 1, d + 2 - i) as i64;
            }
            for j in 2..=((d as i64 + 1 - wind) as usize).saturating_sub(i) {
                acc += x.cell(j, i) as i64 - x.cell(j - 1, i + 1) as i64;
            }
            c[i - 1] = acc;
        }
    }
    c
}

/// `ŝgn` of a finite ascending set: the parity sign of the permutation
/// placing the set before the rest of its covering interval
/// `{min, …, max}`, order preserved in both groups.
pub fn hat_sgn(set: &[u32]) -> i8 {
    if set.is_empty() {
        return 1;
    }
    let min = set[0] as i64;
    let mut inv = 0i64;
    for (idx, &v) in set.iter().enumerate() {
        inv += v as i64 - min - idx as i64;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Index sets `X̂`, `Ŷ` and the sign `ẑ = ŝgn(X̂)·ŝgn(Ŷ)`. For `𝔡 > 0` the
/// sets read the unpinned first-column cells of `𝔵` and `𝔶`; for `𝔡 < 0`
/// they read the wide rows' last-column cells with the roles of `𝔵` and
/// `𝔶` swapped.
pub fn sign_and_index_sets(
    s: &Symbol,
    x: &Tableau,
    y: &Tableau,
    wind: i64,
) -> (Vec<u32>, Vec<u32>, i8) {
    let d = s.d() as usize;
    let d2 = s.d2() as usize;
    let (mut xhat, mut yhat): (Vec<u32>, Vec<u32>) = if wind > 0 {
        let w = wind as usize;
        (
            (d2 + 1..=d2 + w).map(|i| x.cell(i, 1)).collect(),
            (d2 + 1..=d2 + w).map(|i| y.cell(i, 1)).collect(),
        )
    } else {
        let w = (-wind) as usize;
        (
            (1..=w).map(|i| y.cell(i, d + 1)).collect(),
            (1..=w).map(|i| x.cell(i, d + 1)).collect(),
        )
    };
    xhat.sort_unstable();
    yhat.sort_unstable();
    let sign = hat_sgn(&xhat) * hat_sgn(&yhat);
    (xhat, yhat, sign)
}

/// Assemble and fully validate a pair from raw tableaux.
pub fn make_pair(s: &Symbol, x: Tableau, y: Tableau, wind: i64) -> Result<FieldTableauPair> {
    let (mu1, mu2) = pair_shapes(s, wind)?;
    let d2 = s.d2() as usize;
    x.validate(&mu1, d2)?;
    y.validate(&mu2, d2)?;
    let c = exponents(s, &x, &y, wind);
    if c.iter().any(|&v| v < 0) {
        return Err(Error::Domain(format!("negative exponent vector {c:?}")));
    }
    let (xhat, yhat, sign) = sign_and_index_sets(s, &x, &y, wind);
    Ok(FieldTableauPair {
        x,
        y,
        c: c.into_iter().map(|v| v as u32).collect(),
        xhat,
        yhat,
        sign,
        wind,
    })
}

/// Membership test for the truncated pair set: valid tableaux of the right
/// shapes with `max_i c_i ≤ L`.
pub fn pair_accepted(
    s: &Symbol,
    x: Tableau,
    y: Tableau,
    wind: i64,
    l: u32,
) -> Result<FieldTableauPair> {
    let pair = make_pair(s, x, y, wind)?;
    if let Some(&worst) = pair.c.iter().max() {
        if worst > l {
            return Err(Error::Domain(format!(
                "max c_i = {worst} exceeds the truncation L = {l}"
            )));
        }
    }
    Ok(pair)
}

/// The coefficient `𝔠(𝔵, 𝔶, z) = ∏_{i≤d₀} λ_i^{-c_i} ∏_{i>d₀} λ_i^{c_i}`.
pub fn coefficient(s: &Symbol, pair: &FieldTableauPair, region: &RegionClass) -> Result<C64> {
    if region.wind_index != pair.wind {
        return Err(Error::RegionMismatch {
            expected: pair.wind,
            got: region.wind_index,
        });
    }
    let d0 = (s.d1() - pair.wind) as usize;
    let mut acc = C64::new(1.0, 0.0);
    for (i, &lam) in region.lambdas.iter().enumerate() {
        let e = pair.c[i] as i32;
        if i < d0 {
            acc *= (C64::new(1.0, 0.0) / lam).powi(e);
        } else {
            acc *= lam.powi(e);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// One additive term of a constraint: `plus − minus` (or a bare `plus`),
/// with the static floor `delta` (0 for row pairs, 1 for diagonal pairs and
/// bare cells).
#[derive(Debug, Clone, Copy)]
struct Term {
    constraint: usize,
    plus: (usize, usize),          // 1-based (row, col)
    minus: Option<(usize, usize)>, // 1-based
    delta: i64,
}

/// One tableau's additive contribution to each `c_i`: terms plus constants.
struct Scheme {
    shape: Vec<usize>,
    pinned: usize,
    terms: Vec<Term>,
    consts: Vec<i64>,
}

fn build_schemes(s: &Symbol, wind: i64) -> Result<(Scheme, Scheme)> {
    let d = s.d() as usize;
    let d1 = s.d1();
    let d2 = s.d2();
    let d0 = (d1 - wind) as usize;
    let (mu1, mu2) = pair_shapes(s, wind)?;
    let mut xt = Vec::new();
    let mut yt = Vec::new();
    let mut xc = vec![0i64; d];
    let mut yc = vec![0i64; d];
    if wind > 0 {
        for i in 1..=d0 {
            for j in 1..=(d - d0) {
                xt.push(Term {
                    constraint: i - 1,
                    plus: (j, i + 1),
                    minus: Some((j, i)),
                    delta: 0,
                });
                xc[i - 1] += 1;
            }
        }
        for i in (d0 + 1)..=d {
            xc[i - 1] += -1 - d2 - wind;
            xt.push(Term {
                constraint: i - 1,
                plus: (1, i),
                minus: None,
                delta: 1,
            });
            for j in 2..=(d + 1 - i) {
                xt.push(Term {
                    constraint: i - 1,
                    plus: (j, i),
                    minus: Some((j - 1, i + 1)),
                    delta: 1,
                });
            }
            yt.push(Term {
                constraint: i - 1,
                plus: (1, d + 1 - i),
                minus: None,
                delta: 1,
            });
            for j in 2..=(i - d0) {
                yt.push(Term {
                    constraint: i - 1,
                    plus: (j, d + 1 - i),
                    minus: Some((j - 1, d + 2 - i)),
                    delta: 1,
                });
            }
        }
    } else {
        let w = (-wind) as usize;
        for i in 1..=d0 {
            for j in 1..=(d2 as usize) {
                xt.push(Term {
                    constraint: i - 1,
                    plus: (j, i + 1),
                    minus: Some((j, i)),
                    delta: 0,
                });
                xc[i - 1] += 1;
            }
            for j in 1..=w {
                yt.push(Term {
                    constraint: i - 1,
                    plus: (j, d + 2 - i),
                    minus: Some((j, d + 1 - i)),
                    delta: 0,
                });
                yc[i - 1] += 1;
            }
        }
        for i in (d0 + 1)..=d {
            xc[i - 1] += -1 - d2 + wind;
            xt.push(Term {
                constraint: i - 1,
                plus: (1, i),
                minus: None,
                delta: 1,
            });
            for j in 2..=((d as i64 + 1 - wind) as usize).saturating_sub(i) {
                xt.push(Term {
                    constraint: i - 1,
                    plus: (j, i),
                    minus: Some((j - 1, i + 1)),
                    delta: 1,
                });
            }
            yt.push(Term {
                constraint: i - 1,
                plus: (1, d + 1 - i),
                minus: None,
                delta: 1,
            });
            for j in 2..=((i as i64 - d1).max(0) as usize) {
                yt.push(Term {
                    constraint: i - 1,
                    plus: (j, d + 1 - i),
                    minus: Some((j - 1, d + 2 - i)),
                    delta: 1,
                });
            }
        }
    }
    let pinned = s.d2() as usize;
    Ok((
        Scheme {
            shape: mu1,
            pinned,
            terms: xt,
            consts: xc,
        },
        Scheme {
            shape: mu2,
            pinned,
            terms: yt,
            consts: yc,
        },
    ))
}

/// Row-major (top-to-bottom, left-to-right) DFS over one tableau. In this
/// order every term resolves at its `plus` cell, so per-cell upper caps
/// come straight from the remaining constraint budgets, and the structural
/// lower bounds (left neighbor, the cells above and above-right) are
/// already placed. `caps[i]` bounds this tableau's contribution to `c_i`.
struct TableauDfs<'a> {
    scheme: &'a Scheme,
    caps: Vec<i64>,
    cell_cap: u32,
    /// terms resolving at each cell id (row-major)
    resolve_here: Vec<Vec<Term>>,
}

fn cell_id(shape: &[usize], r: usize, c: usize) -> usize {
    let mut id = 0;
    for rr in 0..(r - 1) {
        id += shape[rr];
    }
    id + c - 1
}

impl<'a> TableauDfs<'a> {
    fn new(scheme: &'a Scheme, caps: Vec<i64>, cell_cap: u32) -> Self {
        let ncells: usize = scheme.shape.iter().sum();
        let mut resolve_here = vec![Vec::new(); ncells];
        for t in &scheme.terms {
            resolve_here[cell_id(&scheme.shape, t.plus.0, t.plus.1)].push(*t);
        }
        TableauDfs {
            scheme,
            caps,
            cell_cap,
            resolve_here,
        }
    }

    fn run(&self, f: &mut impl FnMut(&Tableau, &[i64]) -> Result<()>) -> Result<()> {
        let mut rows: Vec<Vec<u32>> = self
            .scheme
            .shape
            .iter()
            .map(|&len| vec![0u32; len])
            .collect();
        let mut running: Vec<i64> = self.scheme.consts.clone();
        for t in &self.scheme.terms {
            running[t.constraint] += t.delta;
        }
        if running.iter().zip(&self.caps).any(|(r, c)| r > c) {
            return Ok(());
        }
        self.place(1, 1, &mut rows, &mut running, f)
    }

    fn place(
        &self,
        r: usize,
        c: usize,
        rows: &mut Vec<Vec<u32>>,
        running: &mut Vec<i64>,
        f: &mut impl FnMut(&Tableau, &[i64]) -> Result<()>,
    ) -> Result<()> {
        let nrows = self.scheme.shape.len();
        if r > nrows {
            let t = Tableau { rows: rows.clone() };
            return f(&t, running);
        }
        let (next_r, next_c) = if c < self.scheme.shape[r - 1] {
            (r, c + 1)
        } else {
            (r + 1, 1)
        };

        // Structural bounds: weak along the row, strict down columns and
        // along southwest diagonals (reading the cell above-right).
        let mut lo = 1u32;
        if c > 1 {
            lo = lo.max(rows[r - 2 + 1][c - 2]);
        }
        if r > 1 && self.scheme.shape[r - 2] >= c {
            lo = lo.max(rows[r - 2][c - 1] + 1);
        }
        if r > 1 && self.scheme.shape[r - 2] >= c + 1 {
            lo = lo.max(rows[r - 2][c] + 1);
        }
        let mut hi = self.cell_cap;
        let id = cell_id(&self.scheme.shape, r, c);
        for t in &self.resolve_here[id] {
            let base = match t.minus {
                Some(m) => rows[m.0 - 1][m.1 - 1] as i64,
                None => 0,
            };
            let cap = base + self.caps[t.constraint] - running[t.constraint] + t.delta;
            hi = hi.min(cap.clamp(0, u32::MAX as i64) as u32);
        }
        if c == 1 && r <= self.scheme.pinned {
            let v = r as u32;
            if v < lo || v > hi {
                return Ok(());
            }
            lo = v;
            hi = v;
        }
        if hi < lo {
            return Ok(());
        }

        for v in lo..=hi {
            rows[r - 1][c - 1] = v;
            for t in &self.resolve_here[id] {
                let base = match t.minus {
                    Some(m) => rows[m.0 - 1][m.1 - 1] as i64,
                    None => 0,
                };
                running[t.constraint] += (v as i64 - base) - t.delta;
            }
            let res = self.place(next_r, next_c, rows, running, f);
            for t in &self.resolve_here[id] {
                let base = match t.minus {
                    Some(m) => rows[m.0 - 1][m.1 - 1] as i64,
                    None => 0,
                };
                running[t.constraint] -= (v as i64 - base) - t.delta;
            }
            res?;
        }
        rows[r - 1][c - 1] = 0;
        Ok(())
    }
}

/// All pairs `(𝔵, 𝔶)` with `max_i c_i(𝔵, 𝔶) ≤ L`, sorted lexicographically
/// on the flattened `(𝔵, 𝔶)` cells.
pub fn enumerate_pairs(s: &Symbol, wind: i64, l: u32) -> Result<Vec<FieldTableauPair>> {
    enumerate_pairs_with_budget(s, wind, l, DEFAULT_PAIR_BUDGET)
}

pub fn enumerate_pairs_with_budget(
    s: &Symbol,
    wind: i64,
    l: u32,
    budget: usize,
) -> Result<Vec<FieldTableauPair>> {
    let mut out = Vec::new();
    visit_pairs(s, wind, l, budget, |p| {
        out.push(p.clone());
        Ok(())
    })?;
    out.sort_by(|a, b| {
        let key = |p: &FieldTableauPair| {
            let mut v: Vec<u32> = p.x.rows.iter().flatten().copied().collect();
            v.extend(p.y.rows.iter().flatten().copied());
            v
        };
        key(a).cmp(&key(b))
    });
    Ok(out)
}

/// Visitor over all pairs with `max c_i ≤ L` (order unspecified). Returns
/// the pair count.
pub fn visit_pairs(
    s: &Symbol,
    wind: i64,
    l: u32,
    budget: usize,
    mut f: impl FnMut(&FieldTableauPair) -> Result<()>,
) -> Result<usize> {
    if l > 64 {
        return Err(Error::Config(format!("truncation L = {l} exceeds 64")));
    }
    let (xs, ys) = build_schemes(s, wind)?;
    let d = s.d() as usize;
    // Hard ceiling on any cell of a valid pair; the chain box of the
    // smallest stable N keeps all members comfortably below this.
    let cell_cap = ((d as u32) + 2) * (l + 2) + 2 * s.d2() as u32 + 2;

    let mut ymin = ys.consts.clone();
    for t in &ys.terms {
        ymin[t.constraint] += t.delta;
    }
    let xcaps: Vec<i64> = (0..d).map(|i| l as i64 - ymin[i]).collect();

    let mut count = 0usize;
    let xdfs = TableauDfs::new(&xs, xcaps, cell_cap);
    xdfs.run(&mut |x, xpart| {
        let ycaps: Vec<i64> = (0..d).map(|i| l as i64 - xpart[i]).collect();
        let xpart = xpart.to_vec();
        let ydfs = TableauDfs::new(&ys, ycaps, cell_cap);
        ydfs.run(&mut |y, ypart| {
            let c: Vec<i64> = (0..d).map(|i| xpart[i] + ypart[i]).collect();
            debug_assert_eq!(c, exponents(s, x, y, wind), "scheme disagrees with formula");
            if c.iter().any(|&v| v < 0 || v > l as i64) {
                return Ok(());
            }
            count += 1;
            if count > budget {
                return Err(Error::BudgetExceeded { count, budget });
            }
            let (xhat, yhat, sign) = sign_and_index_sets(s, x, y, wind);
            f(&FieldTableauPair {
                x: x.clone(),
                y: y.clone(),
                c: c.iter().map(|&v| v as u32).collect(),
                xhat,
                yhat,
                sign,
                wind,
            })
        })
    })?;
    Ok(count)
}

// ---------------------------------------------------------------------------
// The chain ↔ pair bijection
// ---------------------------------------------------------------------------

/// Map an index chain to its tableau pair through the affine relabelings:
/// `𝔵_{i,j} = N+d₂+1−x_{j, |𝔡|+d₂−i+1}` and `𝔶_{i,j} = x_{d+2−j, i}`. The
/// mapped pair satisfies `c_i = ℓ̂_i` level by level.
pub fn chain_to_pair(
    s: &Symbol,
    chain: &IndexChain,
    n: usize,
    wind: i64,
) -> Result<FieldTableauPair> {
    let d = s.d() as usize;
    let d2 = s.d2() as usize;
    let nn = (n + d2) as u32;
    let (mu1, mu2) = pair_shapes(s, wind)?;
    let x_at = |row: usize, col: usize| -> u32 { chain.sets[row - 1][col - 1] };
    let w = wind.unsigned_abs() as usize;

    let xrows: Vec<Vec<u32>> = (1..=mu1.len())
        .map(|i| {
            (1..=mu1[i - 1])
                .map(|j| nn + 1 - x_at(j, w + d2 - i + 1))
                .collect()
        })
        .collect();
    let yrows: Vec<Vec<u32>> = (1..=mu2.len())
        .map(|i| (1..=mu2[i - 1]).map(|j| x_at(d + 2 - j, i)).collect())
        .collect();
    make_pair(s, Tableau::new(xrows), Tableau::new(yrows), wind)
}

/// The inverse of [`chain_to_pair`], for bijectivity checks.
pub fn pair_to_chain(s: &Symbol, pair: &FieldTableauPair, n: usize) -> Result<IndexChain> {
    let d = s.d() as usize;
    let d2 = s.d2() as usize;
    let wind = pair.wind;
    let k = wind.unsigned_abs() as usize;
    let m = k + d2;
    let nn = (n + d2) as u32;
    let mut sets = vec![vec![0u32; m]; d + 1];
    for (i, row) in pair.x.rows.iter().enumerate() {
        let col = k + d2 - i; // 1-based chain column
        for (j, &v) in row.iter().enumerate() {
            if v > nn {
                return Err(Error::Domain("pair outside the chain box".into()));
            }
            sets[j][col - 1] = nn + 1 - v;
        }
    }
    for (i, row) in pair.y.rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            sets[d - j][i] = v;
        }
    }
    for set in &sets {
        if set.iter().any(|&v| v == 0) {
            return Err(Error::Domain("pair does not fill a full chain".into()));
        }
        for w in set.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Domain("reconstructed chain not ascending".into()));
            }
        }
    }
    Ok(IndexChain { k, sets })
}

/// The sign bridge of the bijection: on `[N]` the placing-permutation signs
/// relate to the pair's `ẑ` through one explicit parity,
/// `sgn(σ_𝕏)·sgn(σ_𝕐) = ẑ · (−1)^{|𝔡|·(N + min X̂ + min Ŷ + 1)}`.
pub fn chain_sign_bridge(pair: &FieldTableauPair, n: usize) -> i8 {
    let k = pair.wind.unsigned_abs();
    let e = k * (n as u64 + pair.xhat[0] as u64 + pair.yhat[0] as u64 + 1);
    if e % 2 == 0 {
        pair.sign
    } else {
        -pair.sign
    }
}

/// The chain-side sign `sgn(σ_𝕏)·sgn(σ_𝕐)`.
pub fn chain_sigma_sign(chain: &IndexChain, n: usize, d2: usize) -> i8 {
    let rows = chain.rows(n);
    let cols = chain.cols(n, d2);
    if (placing_parity(&rows) + placing_parity(&cols)) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The stable index sets of a chain, for cross-checking `X̂`, `Ŷ`.
pub fn chain_stable_sets(
    chain: &IndexChain,
    n: usize,
    d2: usize,
    wind: i64,
) -> (Vec<u32>, Vec<u32>) {
    stable_sets(&chain.rows(n), &chain.cols(n, d2), wind, n, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::enumerate_chains;
    use std::collections::HashSet;

    fn t(rows: &[&[u32]]) -> Tableau {
        Tableau::new(rows.iter().map(|r| r.to_vec()).collect())
    }

    fn fig2_symbol() -> Symbol {
        // d1 = d2 = 3; the tableau combinatorics see only the band limits.
        Symbol::new(&[
            (-3, C64::new(1.0, 0.0)),
            (1, C64::new(0.5, 0.0)),
            (3, C64::new(1.0, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn shapes_by_winding() {
        let s = fig2_symbol();
        assert_eq!(
            pair_shapes(&s, 1).unwrap(),
            (vec![6, 5, 4, 3], vec![4, 3, 2, 1])
        );
        assert_eq!(pair_shapes(&s, -1).unwrap(), (vec![7, 6, 5], vec![7, 2, 1]));
        assert_eq!(pair_shapes(&s, -3).unwrap(), (vec![7, 7, 7], vec![7, 7, 7]));
        let lim = Symbol::limacon();
        assert_eq!(pair_shapes(&lim, 1).unwrap(), (vec![2], vec![1]));
        assert_eq!(pair_shapes(&lim, 2).unwrap(), (vec![2, 1], vec![2, 1]));
        assert!(pair_shapes(&lim, 0).is_err());
    }

    // The two printed tableau pairs with their exact exponent vectors.
    #[test]
    fn figure_fixture_exponents() {
        let s = fig2_symbol();
        let x = t(&[
            &[1, 1, 1, 2, 4, 6],
            &[2, 2, 3, 6, 7],
            &[3, 5, 9, 9],
            &[6, 10, 12],
        ]);
        let y = t(&[&[1, 1, 1, 9], &[2, 2, 10], &[3, 11], &[12]]);
        let pair = pair_accepted(&s, x, y, 1, 15).unwrap();
        assert_eq!(pair.c, vec![10, 11, 12, 3, 3, 5]);
        assert_eq!(pair.xhat, vec![6]);
        assert_eq!(pair.yhat, vec![12]);

        let x = t(&[
            &[1, 1, 1, 6, 7, 8, 8],
            &[2, 2, 10, 10, 10, 11],
            &[3, 12, 12, 12, 12],
        ]);
        let y = t(&[&[1, 1, 1, 8, 8, 11, 12], &[2, 2], &[3]]);
        let pair = pair_accepted(&s, x, y, -1, 15).unwrap();
        assert_eq!(pair.c, vec![14, 15, 9, 12, 7, 9]);
        assert_eq!(pair.xhat, vec![12]);
        assert_eq!(pair.yhat, vec![8]);
        assert_eq!(
            pair.dump_line(),
            "1 1 1 6 7 8 8|2 2 10 10 10 11|3 12 12 12 12 / 1 1 1 8 8 11 12|2 2|3"
        );
    }

    #[test]
    fn fixture_rejected_above_its_exponents() {
        let s = fig2_symbol();
        let x = t(&[
            &[1, 1, 1, 6, 7, 8, 8],
            &[2, 2, 10, 10, 10, 11],
            &[3, 12, 12, 12, 12],
        ]);
        let y = t(&[&[1, 1, 1, 8, 8, 11, 12], &[2, 2], &[3]]);
        // max c_i = 15 > 14
        assert!(pair_accepted(&s, x, y, -1, 14).is_err());
    }

    #[test]
    fn jordan_pair_count_is_k_plus_one() {
        let s = Symbol::jordan();
        let pairs = enumerate_pairs(&s, 1, 30).unwrap();
        for k in 0..=30u32 {
            let count = pairs.iter().filter(|p| p.c[0] == k).count();
            assert_eq!(count, k as usize + 1, "count at c_1 = {k}");
        }
    }

    #[test]
    fn hat_sgn_small_sets() {
        assert_eq!(hat_sgn(&[5]), 1);
        assert_eq!(hat_sgn(&[2, 3]), 1);
        assert_eq!(hat_sgn(&[1, 3]), -1); // 3 passes over {2}
        assert_eq!(hat_sgn(&[1, 4]), 1); // 4 passes over {2, 3}
        assert_eq!(hat_sgn(&[1, 3, 4]), 1);
    }

    #[test]
    fn enumerate_respects_shapes_and_pinning() {
        let s = Symbol::ellipse();
        let pairs = enumerate_pairs(&s, -1, 6).unwrap();
        assert!(!pairs.is_empty());
        let (mu1, mu2) = pair_shapes(&s, -1).unwrap();
        let mut seen = HashSet::new();
        for p in &pairs {
            assert_eq!(p.x.shape(), mu1);
            assert_eq!(p.y.shape(), mu2);
            assert_eq!(p.x.cell(1, 1), 1);
            assert_eq!(p.y.cell(1, 1), 1);
            assert!(p.c.iter().all(|&c| c <= 6));
            assert!(seen.insert(p.dump_line()), "duplicate pair");
        }
    }

    #[test]
    fn enumeration_complete_against_brute_force() {
        // Limaçon 𝒮₂: shapes (2,1)/(2,1); brute-force a box large enough to
        // contain every candidate and compare.
        let s = Symbol::limacon();
        let l = 5u32;
        let pairs = enumerate_pairs(&s, 2, l).unwrap();
        let mut brute = Vec::new();
        let bound = 2 * l + 6;
        for x11 in 1..=bound {
            for x12 in x11..=bound {
                for x21 in (x12 + 1)..=bound {
                    for y11 in 1..=bound {
                        for y12 in y11..=bound {
                            for y21 in (y12 + 1)..=bound {
                                let x = t(&[&[x11, x12], &[x21]]);
                                let y = t(&[&[y11, y12], &[y21]]);
                                if let Ok(p) = pair_accepted(&s, x, y, 2, l) {
                                    brute.push(p.dump_line());
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(pairs.len(), brute.len());
        let set: HashSet<String> = pairs.iter().map(|p| p.dump_line()).collect();
        for b in brute {
            assert!(set.contains(&b));
        }
    }

    fn bijection_suite(s: &Symbol, wind: i64, l: u32) {
        let d = s.d() as usize;
        let d2 = s.d2() as usize;
        let n = 2 * l as usize + 2 * d + d2 + 4;
        let pairs = enumerate_pairs(s, wind, l).unwrap();
        let d0 = (s.d1() - wind) as usize;
        let k = wind.unsigned_abs() as usize;
        let lows: Vec<u32> = (0..d)
            .map(|i| if i < d0 { (k + d2) as u32 } else { 0 })
            .collect();
        let mut hat = lows.clone();
        let mut total = 0usize;
        let mut images = HashSet::new();
        loop {
            for chain in enumerate_chains(s, n, k, wind, &hat, 1_000_000).unwrap() {
                total += 1;
                let pair = chain_to_pair(s, &chain, n, wind).unwrap();
                assert_eq!(pair.c.as_slice(), hat.as_slice(), "exponent preservation");
                let sigma = chain_sigma_sign(&chain, n, d2);
                assert_eq!(sigma, chain_sign_bridge(&pair, n), "sign preservation");
                let (r, c) = chain_stable_sets(&chain, n, d2, wind);
                assert_eq!(r, pair.xhat, "X̂ from the chain");
                assert_eq!(c, pair.yhat, "Ŷ from the chain");
                let back = pair_to_chain(s, &pair, n).unwrap();
                assert_eq!(&back, &chain, "inverse round trip");
                assert!(images.insert(pair.dump_line()), "image not injective");
            }
            let mut pos = d;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if hat[pos] < l {
                    hat[pos] += 1;
                    for i in (pos + 1)..d {
                        hat[i] = lows[i];
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        assert_eq!(total, pairs.len(), "bijection is not onto");
        for p in &pairs {
            assert!(images.contains(&p.dump_line()), "missing {}", p.dump_line());
        }
    }

    #[test]
    fn chain_bijection_limacon_wind_one() {
        bijection_suite(&Symbol::limacon(), 1, 4);
    }

    #[test]
    fn chain_bijection_limacon_wind_two() {
        bijection_suite(&Symbol::limacon(), 2, 3);
    }

    #[test]
    fn chain_bijection_ellipse() {
        bijection_suite(&Symbol::ellipse(), -1, 4);
    }

    // |𝔠(𝔵,𝔶,z)| ≤ (1−m)^{Σ c̃_i} where the margin-adjusted exponents
    // shave k+d₂ off the outside-group entries.
    #[test]
    fn coefficient_magnitude_bound() {
        let s = Symbol::limacon();
        let z = C64::new(0.5, 0.2);
        let region = crate::roots::classify_region(&s, z).unwrap();
        assert_eq!(region.wind_index, 1);
        let d0 = (s.d1() - 1) as usize;
        let k_d2 = 1 + s.d2() as usize;
        for pair in enumerate_pairs(&s, 1, 6).unwrap() {
            let coeff = coefficient(&s, &pair, &region).unwrap();
            let adj: u32 = pair
                .c
                .iter()
                .enumerate()
                .map(|(i, &ci)| if i < d0 { ci - k_d2 as u32 } else { ci })
                .sum();
            let bound = (1.0 - region.margin).powi(adj as i32);
            assert!(
                coeff.norm() <= bound * (1.0 + 1e-12),
                "|coeff| = {} exceeds (1-m)^{adj} = {bound}",
                coeff.norm()
            );
        }
    }

    #[test]
    fn pair_budget_is_loud() {
        let s = Symbol::limacon();
        let err = enumerate_pairs_with_budget(&s, 1, 10, 3).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn chain_bijection_wide_negative_wind() {
        // d1 = 1, d2 = 2, 𝔡 = −1: exercises the non-extreme negative branch
        // with genuinely wide leading rows.
        let s = Symbol::new(&[(-2, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]).unwrap();
        bijection_suite(&s, -1, 3);
    }
}
