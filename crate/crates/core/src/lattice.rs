//! Lattice families as implicit graphs on integer coordinates.
//!
//! Every site is an integer pair `(i, j)`. A [`LatticeSpec`] fixes how those
//! pairs are embedded in the plane and which index offsets are edges. All
//! triangular families share the axial embedding
//! `(i, j) ↦ δ·(i + j/2, h(k)·j)`, so changing the shape parameter `k` moves
//! the points but never the indices or the adjacency. That makes the
//! stretched and equilateral lattices literally the same graph.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{LinearMap, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("shape parameter k = {0} must be finite and > 1/2")]
    InvalidShape(f64),
    #[error("mesh delta = {0} must be finite and > 0")]
    InvalidMesh(f64),
    #[error("window radius {0} is below the minimum of 2")]
    WindowTooSmall(i64),
    #[error("unknown lattice family `{0}`")]
    UnknownFamily(String),
    #[error("family `{0}` takes no shape parameter k (it is fixed to 1)")]
    UnexpectedShape(FamilyTag),
}

/// Integer lattice coordinates. The embedding lives on [`LatticeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: i64,
    pub j: i64,
}

impl Site {
    pub const fn new(i: i64, j: i64) -> Self {
        Self { i, j }
    }

    pub fn offset(self, (di, dj): (i64, i64)) -> Site {
        Site::new(self.i + di, self.j + dj)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Family name without parameters; the string form used by configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    Square,
    Triangular,
    SquareNe,
    TriNe,
    TriNw,
    TriH,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 6] = [
        FamilyTag::Square,
        FamilyTag::Triangular,
        FamilyTag::SquareNe,
        FamilyTag::TriNe,
        FamilyTag::TriNw,
        FamilyTag::TriH,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Square => "square",
            FamilyTag::Triangular => "triangular",
            FamilyTag::SquareNe => "square-ne",
            FamilyTag::TriNe => "tri-ne",
            FamilyTag::TriNw => "tri-nw",
            FamilyTag::TriH => "tri-h",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| LatticeError::UnknownFamily(s.to_owned()))
    }
}

/// A lattice family. `Triangular(k)` has base edges of length δ and slanted
/// edges of length k·δ; `Triangular(1)` is the equilateral lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticeFamily {
    Square,
    Triangular(f64),
    /// Square lattice plus the north-east diagonal of every cell.
    SquareNe,
    /// Equilateral embedding, horizontal and north-east edges only.
    TriNe,
    /// Equilateral embedding, horizontal and north-west edges only.
    TriNw,
    /// Equilateral embedding, north-east and north-west edges only.
    TriH,
}

const SQUARE_OFFSETS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const TRIANGULAR_OFFSETS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (-1, 1), (1, -1)];
const SQUARE_NE_OFFSETS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];
const TRI_NE_OFFSETS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const TRI_NW_OFFSETS: [(i64, i64); 4] = [(1, 0), (-1, 0), (-1, 1), (1, -1)];
const TRI_H_OFFSETS: [(i64, i64); 4] = [(0, 1), (0, -1), (-1, 1), (1, -1)];

impl LatticeFamily {
    pub fn triangular(k: f64) -> Result<Self, LatticeError> {
        if !(k.is_finite() && k > 0.5) {
            return Err(LatticeError::InvalidShape(k));
        }
        Ok(LatticeFamily::Triangular(k))
    }

    pub fn equilateral() -> Self {
        LatticeFamily::Triangular(1.0)
    }

    /// Builds a family from its tag; `k` is required for `triangular` and
    /// rejected elsewhere.
    pub fn from_parts(tag: FamilyTag, k: Option<f64>) -> Result<Self, LatticeError> {
        match (tag, k) {
            (FamilyTag::Triangular, k) => Self::triangular(k.unwrap_or(1.0)),
            (tag, Some(k)) if k != 1.0 => Err(LatticeError::UnexpectedShape(tag)),
            (FamilyTag::Square, _) => Ok(LatticeFamily::Square),
            (FamilyTag::SquareNe, _) => Ok(LatticeFamily::SquareNe),
            (FamilyTag::TriNe, _) => Ok(LatticeFamily::TriNe),
            (FamilyTag::TriNw, _) => Ok(LatticeFamily::TriNw),
            (FamilyTag::TriH, _) => Ok(LatticeFamily::TriH),
        }
    }

    pub fn tag(&self) -> FamilyTag {
        match self {
            LatticeFamily::Square => FamilyTag::Square,
            LatticeFamily::Triangular(_) => FamilyTag::Triangular,
            LatticeFamily::SquareNe => FamilyTag::SquareNe,
            LatticeFamily::TriNe => FamilyTag::TriNe,
            LatticeFamily::TriNw => FamilyTag::TriNw,
            LatticeFamily::TriH => FamilyTag::TriH,
        }
    }

    /// Shape parameter; 1 for every family but `Triangular(k)`.
    pub fn k(&self) -> f64 {
        match self {
            LatticeFamily::Triangular(k) => *k,
            _ => 1.0,
        }
    }

    pub fn uses_triangular_embedding(&self) -> bool {
        !matches!(self, LatticeFamily::Square | LatticeFamily::SquareNe)
    }

    /// Index offsets of the neighbours of any site. Closed under negation.
    pub fn neighbor_offsets(&self) -> &'static [(i64, i64)] {
        match self {
            LatticeFamily::Square => &SQUARE_OFFSETS,
            LatticeFamily::Triangular(_) => &TRIANGULAR_OFFSETS,
            LatticeFamily::SquareNe => &SQUARE_NE_OFFSETS,
            LatticeFamily::TriNe => &TRI_NE_OFFSETS,
            LatticeFamily::TriNw => &TRI_NW_OFFSETS,
            LatticeFamily::TriH => &TRI_H_OFFSETS,
        }
    }

    /// Critical site density where it is known: 1/2 for the triangular
    /// lattices and for the square lattice with diagonals (which is a
    /// rotated triangular lattice).
    pub fn critical_probability(&self) -> Option<f64> {
        match self {
            LatticeFamily::Triangular(_) | LatticeFamily::SquareNe => Some(0.5),
            _ => None,
        }
    }
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeFamily::Triangular(k) => write!(f, "triangular(k={k})"),
            other => f.write_str(other.tag().as_str()),
        }
    }
}

/// Row height factor h(k) = sqrt(k² − 1/4): apex height of the isosceles
/// triangle with unit base and legs of length k.
pub fn row_height_factor(k: f64) -> f64 {
    (k * k - 0.25).sqrt()
}

/// Vertical stretch taking the equilateral lattice onto `Triangular(k)`.
pub fn stretch_factor(k: f64) -> f64 {
    2.0 * row_height_factor(k) / 3f64.sqrt()
}

/// A lattice family together with its mesh δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct LatticeSpec {
    family: LatticeFamily,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    delta: f64,
}

impl TryFrom<SpecRepr> for LatticeSpec {
    type Error = LatticeError;
    fn try_from(r: SpecRepr) -> Result<Self, Self::Error> {
        LatticeSpec::new(LatticeFamily::from_parts(r.family, r.k)?, r.delta)
    }
}

impl From<LatticeSpec> for SpecRepr {
    fn from(s: LatticeSpec) -> Self {
        SpecRepr {
            family: s.family.tag(),
            k: matches!(s.family, LatticeFamily::Triangular(_)).then(|| s.family.k()),
            delta: s.delta,
        }
    }
}

impl LatticeSpec {
    pub fn new(family: LatticeFamily, delta: f64) -> Result<Self, LatticeError> {
        if let LatticeFamily::Triangular(k) = family {
            LatticeFamily::triangular(k)?;
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LatticeError::InvalidMesh(delta));
        }
        Ok(Self { family, delta })
    }

    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Vertical spacing between consecutive rows, δ·h(k) for triangular
    /// families and δ for the square ones.
    pub fn row_height(&self) -> f64 {
        if self.family.uses_triangular_embedding() {
            self.delta * row_height_factor(self.family.k())
        } else {
            self.delta
        }
    }

    /// Columns are the images of the unit index vectors `(1,0)` and `(0,1)`.
    pub fn basis(&self) -> LinearMap {
        if self.family.uses_triangular_embedding() {
            LinearMap {
                m: [[self.delta, 0.5 * self.delta], [0.0, self.row_height()]],
            }
        } else {
            LinearMap::diag(self.delta, self.delta)
        }
    }

    pub fn embed(&self, s: Site) -> Point {
        let (i, j) = (s.i as f64, s.j as f64);
        if self.family.uses_triangular_embedding() {
            Point::new(self.delta * (i + 0.5 * j), self.row_height() * j)
        } else {
            Point::new(self.delta * i, self.delta * j)
        }
    }

    /// Fractional index coordinates of a plane point.
    pub fn unembed(&self, p: Point) -> (f64, f64) {
        let j = p.y / self.row_height();
        let i = if self.family.uses_triangular_embedding() {
            p.x / self.delta - 0.5 * j
        } else {
            p.x / self.delta
        };
        (i, j)
    }

    /// The lattice site sitting at `p`, if any (within `tol` in plane units).
    pub fn site_at(&self, p: Point, tol: f64) -> Option<Site> {
        let (fi, fj) = self.unembed(p);
        let s = Site::new(fi.round() as i64, fj.round() as i64);
        self.embed(s).approx_eq(p, tol).then_some(s)
    }

    pub fn neighbor_offsets(&self) -> &'static [(i64, i64)] {
        self.family.neighbor_offsets()
    }

    pub fn neighbors(&self, s: Site) -> impl Iterator<Item = Site> + '_ {
        self.neighbor_offsets().iter().map(move |&o| s.offset(o))
    }

    /// Largest embedded edge length allowed for this family.
    pub fn edge_length_bound(&self) -> f64 {
        match self.family {
            LatticeFamily::Square => self.delta,
            LatticeFamily::SquareNe => std::f64::consts::SQRT_2 * self.delta,
            other => self.delta * other.k().max(1.0),
        }
    }
}

/// Vertical stretch `diag(1, s(k))` carrying every site of the equilateral
/// lattice onto the same-index site of `Triangular(k)`.
pub fn family_map(k: f64) -> Result<LinearMap, LatticeError> {
    LatticeFamily::triangular(k)?;
    Ok(LinearMap::diag(1.0, stretch_factor(k)))
}

/// Rotation `Z ↦ e^{−iπ/4}·Z`.
pub fn rotation_map() -> LinearMap {
    LinearMap::rotation(-std::f64::consts::FRAC_PI_4)
}

/// Shape parameter of the triangular lattice that the diagonal-augmented
/// square lattice becomes after rotation by −π/4.
pub const SQUARE_NE_EQUIVALENT_K: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Index bijection from the diagonal-augmented square lattice of mesh δ/√2
/// to `Triangular(1/√2)` of mesh δ. Under [`rotation_map`] the embedded
/// points agree site for site.
pub fn square_ne_to_triangular(s: Site) -> Site {
    Site::new(s.i, s.j - s.i)
}

pub fn triangular_to_square_ne(s: Site) -> Site {
    Site::new(s.i, s.j + s.i)
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodCheck {
    pub vector: Point,
    pub is_period: bool,
}

/// Finite-window check of bounded degree, finite edges and connectivity,
/// plus translation-periodicity of the embedded vertex set.
#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub spec: LatticeSpec,
    pub window_radius: i64,
    pub window_sites: usize,
    pub max_degree: usize,
    pub degree_bound: usize,
    pub symmetric: bool,
    pub max_edge_length: f64,
    pub edge_length_bound: f64,
    pub sites_per_unit_area: f64,
    pub connected: bool,
    pub periods: Vec<PeriodCheck>,
}

impl GraphReport {
    pub fn bounded_degree(&self) -> bool {
        self.symmetric && self.max_degree <= self.degree_bound && self.degree_bound <= 6
    }

    pub fn finite_edges(&self) -> bool {
        self.max_edge_length.is_finite()
            && self.max_edge_length <= self.edge_length_bound * (1.0 + 1e-12)
            && self.sites_per_unit_area.is_finite()
            && self.sites_per_unit_area > 0.0
    }

    pub fn satisfies_requirements(&self) -> bool {
        self.bounded_degree() && self.finite_edges() && self.connected
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.bounded_degree() {
            out.push("bounded degree");
        }
        if !self.finite_edges() {
            out.push("finite edges / local finiteness");
        }
        if !self.connected {
            out.push("connectivity");
        }
        out
    }
}

pub fn validate_graph_requirements(
    spec: &LatticeSpec,
    window_radius: i64,
    periods: &[Point],
) -> Result<GraphReport, LatticeError> {
    if window_radius < 2 {
        return Err(LatticeError::WindowTooSmall(window_radius));
    }
    let r = window_radius;
    let in_window = |s: Site| s.i.abs() <= r && s.j.abs() <= r;
    let offsets = spec.neighbor_offsets();
    let symmetric = offsets
        .iter()
        .all(|&(di, dj)| offsets.contains(&(-di, -dj)));

    let window: Vec<Site> = (-r..=r)
        .flat_map(|j| (-r..=r).map(move |i| Site::new(i, j)))
        .collect();

    let mut max_degree = 0;
    let mut max_edge_length = 0.0f64;
    for &s in &window {
        let p = spec.embed(s);
        let mut degree = 0;
        for n in spec.neighbors(s).filter(|&n| in_window(n)) {
            degree += 1;
            max_edge_length = max_edge_length.max(p.dist(spec.embed(n)));
        }
        max_degree = max_degree.max(degree);
    }

    // Local finiteness: count sites in a disc well inside the window.
    let inner = spec.embed(Site::new(r, 0)).x.min(spec.embed(Site::new(0, r)).y) * 0.5;
    let in_disc = window
        .iter()
        .filter(|&&s| spec.embed(s).norm() <= inner)
        .count();
    let sites_per_unit_area = in_disc as f64 / (std::f64::consts::PI * inner * inner);

    let mut seen = HashSet::with_capacity(window.len());
    let mut queue = VecDeque::from([Site::new(0, 0)]);
    seen.insert(Site::new(0, 0));
    while let Some(s) = queue.pop_front() {
        for n in spec.neighbors(s) {
            if in_window(n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let connected = seen.len() == window.len();

    let tol = 1e-9 * spec.delta();
    let half = r / 2;
    let periods = periods
        .iter()
        .map(|&v| {
            let is_period = window
                .iter()
                .filter(|s| s.i.abs() <= half && s.j.abs() <= half)
                .all(|&s| {
                    let p = spec.embed(s);
                    spec.site_at(p + v, tol).is_some() && spec.site_at(p - v, tol).is_some()
                });
            PeriodCheck { vector: v, is_period }
        })
        .collect();

    Ok(GraphReport {
        spec: *spec,
        window_radius: r,
        window_sites: window.len(),
        max_degree,
        degree_bound: offsets.len(),
        symmetric,
        max_edge_length,
        edge_length_bound: spec.edge_length_bound(),
        sites_per_unit_area,
        connected,
        periods,
    })
}
