//! Marked triangular domains and their discretisation on a lattice.
//!
//! A [`MarkedTriangle`] carries vertices α, β, γ and a marked point x on the
//! open base α–β. Its boundary splits into four arcs: `ax` (α→x), `xb`
//! (x→β), `bc` (β→γ) and `ca` (γ→α). [`classify`] keeps the lattice sites
//! inside the closed triangle and attaches every boundary site to the arc
//! nearest to it.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{LinearMap, Point};
use crate::lattice::{
    self, square_ne_to_triangular, LatticeFamily, LatticeSpec, Site, SQUARE_NE_EQUIVALENT_K,
};

/// Relative tolerance (times the domain diameter) for membership and arc ties.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("degenerate domain: triangle has zero area")]
    Degenerate,
    #[error("marked point parameter {0} is not in the open interval (0, 1)")]
    MarkedPointOutOfRange(f64),
    #[error("snapping x = {requested} to the lattice lands on an endpoint of the base")]
    SnapCollision { requested: f64 },
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(&'static str),
    #[error("degenerate discretization: in-domain sites are not connected ({components} components)")]
    Disconnected { components: usize },
    #[error("no standard triangle for lattice family {0}")]
    UnsupportedFamily(LatticeFamily),
    #[error("site relabelling is not injective: {0} is hit twice")]
    NotInjective(Site),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arc {
    Ax,
    Xb,
    Bc,
    Ca,
}

impl Arc {
    /// Tie-break order: the two arcs defining the crossing event come first.
    pub const PRIORITY: [Arc; 4] = [Arc::Ax, Arc::Bc, Arc::Xb, Arc::Ca];

    pub fn as_str(self) -> &'static str {
        match self {
            Arc::Ax => "ax",
            Arc::Xb => "xb",
            Arc::Bc => "bc",
            Arc::Ca => "ca",
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkedTriangle {
    pub alpha: Point,
    pub beta: Point,
    pub gamma: Point,
    /// Position of x along α→β as originally requested.
    pub x_requested: f64,
    /// Actual position of x along α→β (after snapping to a lattice vertex).
    pub x_param: f64,
}

impl MarkedTriangle {
    pub fn new(alpha: Point, beta: Point, gamma: Point, x_param: f64) -> Result<Self, DomainError> {
        if !(x_param > 0.0 && x_param < 1.0) {
            return Err(DomainError::MarkedPointOutOfRange(x_param));
        }
        let tri = Self {
            alpha,
            beta,
            gamma,
            x_requested: x_param,
            x_param,
        };
        let diam = tri.diameter();
        let twice_area = (beta - alpha).cross(gamma - alpha).abs();
        if !(diam > 0.0 && twice_area > 1e-12 * diam * diam) || !twice_area.is_finite() {
            return Err(DomainError::Degenerate);
        }
        Ok(tri)
    }

    pub fn x(&self) -> Point {
        self.alpha + (self.beta - self.alpha) * self.x_param
    }

    pub fn diameter(&self) -> f64 {
        self.alpha
            .dist(self.beta)
            .max(self.beta.dist(self.gamma))
            .max(self.gamma.dist(self.alpha))
    }

    pub fn arc_endpoints(&self, arc: Arc) -> (Point, Point) {
        match arc {
            Arc::Ax => (self.alpha, self.x()),
            Arc::Xb => (self.x(), self.beta),
            Arc::Bc => (self.beta, self.gamma),
            Arc::Ca => (self.gamma, self.alpha),
        }
    }

    /// Closed-triangle membership; points within `REL_TOL · diameter` of an
    /// edge count as inside.
    pub fn contains(&self, p: Point) -> bool {
        let tol = REL_TOL * self.diameter();
        let orient = (self.beta - self.alpha).cross(self.gamma - self.alpha).signum();
        [
            (self.alpha, self.beta),
            (self.beta, self.gamma),
            (self.gamma, self.alpha),
        ]
        .iter()
        .all(|&(a, b)| orient * (b - a).cross(p - a) / a.dist(b) >= -tol)
    }

    /// Arc nearest to `p`, ties (within tolerance) broken by [`Arc::PRIORITY`].
    pub fn nearest_arc(&self, p: Point) -> Arc {
        let tol = REL_TOL * self.diameter();
        let dists = Arc::PRIORITY.map(|arc| {
            let (a, b) = self.arc_endpoints(arc);
            p.dist_to_segment(a, b)
        });
        let best = dists.iter().copied().fold(f64::INFINITY, f64::min);
        let pos = dists.iter().position(|&d| d <= best + tol).unwrap_or(0);
        Arc::PRIORITY[pos]
    }

    /// Image under a linear map; the marked point keeps its parameter.
    pub fn transformed(&self, m: &LinearMap) -> Result<Self, DomainError> {
        let mut out = Self::new(
            m.apply(self.alpha),
            m.apply(self.beta),
            m.apply(self.gamma),
            self.x_param,
        )?;
        out.x_requested = self.x_requested;
        Ok(out)
    }
}

/// Unit-base triangle for a lattice family, with x snapped to the nearest
/// lattice vertex on the base.
///
/// Triangular families get the image of the unit equilateral triangle under
/// [`lattice::family_map`]; the diagonal-augmented square lattice gets
/// α=(0,0), β=(1/√2,1/√2), γ=(0,1/√2), which rotates onto the 45° triangle
/// with base (0,0)–(1,0).
pub fn standard_triangle(spec: &LatticeSpec, x_param: f64) -> Result<MarkedTriangle, DomainError> {
    if !(x_param > 0.0 && x_param < 1.0) {
        return Err(DomainError::MarkedPointOutOfRange(x_param));
    }
    let family = spec.family();
    let (alpha, beta, gamma) = match family {
        LatticeFamily::Square => return Err(DomainError::UnsupportedFamily(family)),
        LatticeFamily::SquareNe => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            (Point::ORIGIN, Point::new(h, h), Point::new(0.0, h))
        }
        _ => {
            let apex = Point::new(0.5, 3f64.sqrt() / 2.0);
            let stretch = lattice::family_map(family.k()).map_err(|_| DomainError::Degenerate)?;
            (Point::ORIGIN, Point::new(1.0, 0.0), stretch.apply(apex))
        }
    };
    let mut tri = MarkedTriangle::new(alpha, beta, gamma, x_param)?;
    tri.x_param = snap_to_base(spec, &tri, x_param)?;
    tri.x_requested = x_param;
    Ok(tri)
}

fn index_bounds(spec: &LatticeSpec, pts: &[Point]) -> (i64, i64, i64, i64) {
    let (mut i0, mut i1, mut j0, mut j1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &p in pts {
        let (i, j) = spec.unembed(p);
        i0 = i0.min(i);
        i1 = i1.max(i);
        j0 = j0.min(j);
        j1 = j1.max(j);
    }
    (
        i0.floor() as i64 - 1,
        i1.ceil() as i64 + 1,
        j0.floor() as i64 - 1,
        j1.ceil() as i64 + 1,
    )
}

fn snap_to_base(spec: &LatticeSpec, tri: &MarkedTriangle, x_param: f64) -> Result<f64, DomainError> {
    let tol = REL_TOL * tri.diameter();
    let (a, b) = (tri.alpha, tri.beta);
    let ab = b - a;
    let len2 = ab.dot(ab);
    let (i0, i1, j0, j1) = index_bounds(spec, &[a, b]);
    let mut best: Option<f64> = None;
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = spec.embed(Site::new(i, j));
            if p.dist_to_segment(a, b) > tol {
                continue;
            }
            let t = (p - a).dot(ab) / len2;
            let better = match best {
                None => true,
                Some(bt) => (t - x_param).abs() < (bt - x_param).abs(),
            };
            if better {
                best = Some(t);
            }
        }
    }
    let t = best.ok_or(DomainError::MeshTooCoarse("no lattice vertex on the base"))?;
    let end_tol = tol / len2.sqrt();
    if t <= end_tol || t >= 1.0 - end_tol {
        return Err(DomainError::SnapCollision { requested: x_param });
    }
    Ok(t.clamp(0.0, 1.0))
}

/// Counts describing a classification; embedded in experiment outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainSummary {
    pub in_domain: usize,
    pub interior: usize,
    pub ax: usize,
    pub xb: usize,
    pub bc: usize,
    pub ca: usize,
    pub x_requested: f64,
    pub x_snapped: f64,
}

/// In-domain sites of a lattice, their induced adjacency (compressed rows
/// of site indices) and arc labels on boundary sites.
#[derive(Debug, Clone)]
pub struct SiteClassification {
    spec: LatticeSpec,
    domain: MarkedTriangle,
    sites: Vec<Site>,
    index: HashMap<Site, u32>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    labels: Vec<Option<Arc>>,
}

pub fn classify(spec: &LatticeSpec, domain: &MarkedTriangle) -> Result<SiteClassification, DomainError> {
    // Re-validate: the fields are public.
    MarkedTriangle::new(domain.alpha, domain.beta, domain.gamma, domain.x_param)?;

    let (i0, i1, j0, j1) = index_bounds(spec, &[domain.alpha, domain.beta, domain.gamma]);
    let sites: Vec<Site> = (j0..=j1)
        .flat_map(|j| (i0..=i1).map(move |i| Site::new(i, j)))
        .filter(|&s| domain.contains(spec.embed(s)))
        .collect();
    if sites.is_empty() {
        return Err(DomainError::MeshTooCoarse("no lattice site inside the domain"));
    }
    SiteClassification::build(*spec, *domain, sites, |s| {
        let p = spec.embed(s);
        domain.nearest_arc(p)
    })
}

impl SiteClassification {
    fn build(
        spec: LatticeSpec,
        domain: MarkedTriangle,
        sites: Vec<Site>,
        label_of: impl Fn(Site) -> Arc,
    ) -> Result<Self, DomainError> {
        let index: HashMap<Site, u32> = sites
            .iter()
            .enumerate()
            .map(|(n, &s)| (s, n as u32))
            .collect();
        let mut adj_start = Vec::with_capacity(sites.len() + 1);
        let mut adj = Vec::with_capacity(sites.len() * spec.neighbor_offsets().len());
        let mut labels = Vec::with_capacity(sites.len());
        for &s in &sites {
            adj_start.push(adj.len() as u32);
            let mut boundary = false;
            for n in spec.neighbors(s) {
                match index.get(&n) {
                    Some(&k) => adj.push(k),
                    None => boundary = true,
                }
            }
            labels.push(boundary.then(|| label_of(s)));
        }
        adj_start.push(adj.len() as u32);

        let cls = Self {
            spec,
            domain,
            sites,
            index,
            adj_start,
            adj,
            labels,
        };
        let components = cls.component_count();
        if components != 1 {
            return Err(DomainError::Disconnected { components });
        }
        Ok(cls)
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.sites.len()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.sites.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start as u32);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn domain(&self) -> &MarkedTriangle {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// In-domain sites in row-major order (by `j`, then `i`).
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn index_of(&self, s: Site) -> Option<u32> {
        self.index.get(&s).copied()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.index.contains_key(&s)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn label(&self, v: u32) -> Option<Arc> {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Option<Arc>] {
        &self.labels
    }

    pub fn label_of(&self, s: Site) -> Option<Arc> {
        self.index_of(s).and_then(|v| self.label(v))
    }

    pub fn sites_with_label(&self, arc: Arc) -> impl Iterator<Item = u32> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == Some(arc))
            .map(|(v, _)| v as u32)
    }

    pub fn summary(&self) -> DomainSummary {
        let count = |arc| self.labels.iter().filter(|l| **l == Some(arc)).count();
        DomainSummary {
            in_domain: self.sites.len(),
            interior: self.labels.iter().filter(|l| l.is_none()).count(),
            ax: count(Arc::Ax),
            xb: count(Arc::Xb),
            bc: count(Arc::Bc),
            ca: count(Arc::Ca),
            x_requested: self.domain.x_requested,
            x_snapped: self.domain.x_param,
        }
    }

    /// Same sites under a new name: every site `s` becomes `f(s)`, keeping
    /// adjacency and labels. `spec` and `domain` describe the target lattice.
    pub fn reindexed(
        &self,
        f: impl Fn(Site) -> Site,
        spec: LatticeSpec,
        domain: MarkedTriangle,
    ) -> Result<Self, DomainError> {
        let mut pairs: Vec<(Site, Option<Arc>)> = self
            .sites
            .iter()
            .zip(&self.labels)
            .map(|(&s, &l)| (f(s), l))
            .collect();
        pairs.sort_by_key(|(s, _)| (s.j, s.i));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(DomainError::NotInjective(w[0].0));
        }
        let sites: Vec<Site> = pairs.iter().map(|(s, _)| *s).collect();
        let new_index: HashMap<Site, u32> = sites
            .iter()
            .enumerate()
            .map(|(n, &s)| (s, n as u32))
            .collect();
        let mut adj_start = Vec::with_capacity(sites.len() + 1);
        let mut adj = Vec::with_capacity(self.adj.len());
        let mut old_of_new = vec![0u32; sites.len()];
        for (old, &s) in self.sites.iter().enumerate() {
            old_of_new[new_index[&f(s)] as usize] = old as u32;
        }
        for &old in &old_of_new {
            adj_start.push(adj.len() as u32);
            let mut nb: Vec<u32> = self
                .neighbors(old)
                .iter()
                .map(|&w| new_index[&f(self.sites[w as usize])])
                .collect();
            nb.sort_unstable();
            adj.extend(nb);
        }
        adj_start.push(adj.len() as u32);
        Ok(Self {
            spec,
            domain,
            sites,
            index: new_index,
            adj_start,
            adj,
            labels: pairs.into_iter().map(|(_, l)| l).collect(),
        })
    }

    /// A classification on the diagonal-augmented square lattice (mesh
    /// δ/√2), rotated by −π/4 and re-indexed onto `Triangular(1/√2)` with
    /// mesh δ.
    pub fn rotated_square_ne(&self) -> Result<Self, DomainError> {
        if self.spec.family() != LatticeFamily::SquareNe {
            return Err(DomainError::UnsupportedFamily(self.spec.family()));
        }
        let delta = self.spec.delta() * std::f64::consts::SQRT_2;
        let spec = LatticeSpec::new(LatticeFamily::Triangular(SQUARE_NE_EQUIVALENT_K), delta)
            .expect("valid triangular spec");
        let domain = self.domain.transformed(&lattice::rotation_map())?;
        self.reindexed(square_ne_to_triangular, spec, domain)
    }

    /// Neighbour lists with each list sorted; canonical form for comparisons.
    pub fn sorted_neighbors(&self, v: u32) -> Vec<u32> {
        let mut nb = self.neighbors(v).to_vec();
        nb.sort_unstable();
        nb
    }
}
