//! Structural data model: design domains, truss configurations, volume
//! accounting, the static-determinacy counting rule, and canonical
//! configuration digests for result caching.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{
    segment_covers_node, segment_length, segments_properly_intersect, Point, Rect, Segment,
};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid element properties: {0}")]
    InvalidProperties(String),
}

/// A support fixing one or both translational degrees of freedom of a node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub at: Point,
    #[serde(default)]
    pub fix_x: bool,
    #[serde(default)]
    pub fix_y: bool,
}

impl Support {
    pub fn restrained_dofs(&self) -> u32 {
        self.fix_x as u32 + self.fix_y as u32
    }
}

/// A static point load applied to a grid node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointLoad {
    pub at: Point,
    #[serde(default)]
    pub fx: f64,
    #[serde(default)]
    pub fy: f64,
}

/// The design grid and everything attached to it: supports, loads, passive
/// regions and the thresholds that bound the synthesis process.
///
/// `width × height` counts grid nodes per axis; candidate positions are the
/// integer points of `[0, width) × [0, height)` with unit spacing. Exactly
/// one of `horizon` (fixed number of decision steps) or `target_node`
/// (progressive construction toward a node) drives episode termination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDomain {
    pub width: i64,
    pub height: i64,
    #[serde(default)]
    pub supports: Vec<Support>,
    #[serde(default)]
    pub loads: Vec<PointLoad>,
    #[serde(default)]
    pub passive_regions: Vec<Rect>,
    #[serde(default)]
    pub v_max: Option<f64>,
    #[serde(default)]
    pub horizon: Option<u32>,
    #[serde(default)]
    pub target_node: Option<Point>,
    #[serde(default)]
    pub max_element_length: Option<f64>,
    #[serde(default)]
    pub self_weight_density: f64,
}

impl DesignDomain {
    pub fn contains(&self, p: Point) -> bool {
        0 <= p.x && p.x < self.width && 0 <= p.y && p.y < self.height
    }

    /// Restrained degrees of freedom declared at `p` (0 if unsupported).
    pub fn restrained_dofs_at(&self, p: Point) -> u32 {
        self.supports
            .iter()
            .filter(|s| s.at == p)
            .map(Support::restrained_dofs)
            .sum()
    }

    /// All candidate node positions, in row-major order.
    pub fn grid_points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Point::new(x, y)))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |m: String| Err(ModelError::InvalidDomain(m));
        if self.width < 2 || self.height < 2 {
            return err(format!("grid must be at least 2×2, got {}×{}", self.width, self.height));
        }
        for s in &self.supports {
            if !self.contains(s.at) {
                return err(format!("support at {} lies outside the grid", s.at));
            }
        }
        for l in &self.loads {
            if !self.contains(l.at) {
                return err(format!("load at {} lies outside the grid", l.at));
            }
            if !(l.fx.is_finite() && l.fy.is_finite()) {
                return err(format!("non-finite load at {}", l.at));
            }
        }
        for r in &self.passive_regions {
            if !r.has_positive_area() {
                return err("passive region must have positive area".into());
            }
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0) {
                return err(format!("v_max must be positive, got {v}"));
            }
        }
        if let Some(l) = self.max_element_length {
            if !(l > 0.0) {
                return err(format!("max_element_length must be positive, got {l}"));
            }
        }
        if !(self.self_weight_density >= 0.0) {
            return err(format!("self_weight_density must be ≥ 0, got {}", self.self_weight_density));
        }
        match (self.horizon, self.target_node) {
            (Some(_), Some(_)) | (None, None) => {
                return err("exactly one of horizon or target_node must be set".into())
            }
            (Some(t), None) if t == 0 => return err("horizon must be ≥ 1".into()),
            (None, Some(g)) if !self.contains(g) => {
                return err(format!("target node {g} lies outside the grid"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Uniform member properties: Young's modulus and cross-sectional area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementProperties {
    pub young_modulus: f64,
    pub area: f64,
}

impl ElementProperties {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.young_modulus > 0.0 && self.young_modulus.is_finite()) {
            return Err(ModelError::InvalidProperties(format!(
                "young_modulus must be positive, got {}",
                self.young_modulus
            )));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(ModelError::InvalidProperties(format!(
                "area must be positive, got {}",
                self.area
            )));
        }
        Ok(())
    }
}

/// An unordered pair of distinct nodes, stored with canonically ordered
/// endpoints so element sets compare and hash consistently.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Element(Point, Point);

impl Element {
    pub fn new(a: Point, b: Point) -> Result<Self, ModelError> {
        if a == b {
            return Err(ModelError::InvalidConfiguration(format!(
                "element endpoints coincide at {a}"
            )));
        }
        Ok(if a <= b { Element(a, b) } else { Element(b, a) })
    }

    pub fn a(&self) -> Point {
        self.0
    }

    pub fn b(&self) -> Point {
        self.1
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.0, self.1)
    }

    pub fn touches(&self, p: Point) -> bool {
        self.0 == p || self.1 == p
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.0, self.1)
    }

    pub fn length(&self) -> f64 {
        segment_length(self.segment())
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}–{}", self.0, self.1)
    }
}

/// A truss layout: the set of active nodes plus the members joining them.
///
/// Invariants (enforced by [`Configuration::new`] and preserved by grammar
/// application):
/// - every element endpoint is an active node;
/// - no element has zero length and no two elements coincide;
/// - no element passes over a third active node;
/// - no two elements properly intersect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    nodes: BTreeSet<Point>,
    elements: BTreeSet<Element>,
}

impl Configuration {
    pub fn empty() -> Self {
        Configuration { nodes: BTreeSet::new(), elements: BTreeSet::new() }
    }

    pub fn new(
        nodes: impl IntoIterator<Item = Point>,
        elements: impl IntoIterator<Item = Element>,
    ) -> Result<Self, ModelError> {
        let c = Configuration {
            nodes: nodes.into_iter().collect(),
            elements: elements.into_iter().collect(),
        };
        c.validate()?;
        Ok(c)
    }

    /// Re-checks every structural invariant from scratch.
    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |m: String| Err(ModelError::InvalidConfiguration(m));
        for e in &self.elements {
            if !self.nodes.contains(&e.a()) || !self.nodes.contains(&e.b()) {
                return err(format!("element {e} has an inactive endpoint"));
            }
            for p in &self.nodes {
                if !e.touches(*p) && segment_covers_node(e.segment(), *p) {
                    return err(format!("element {e} passes over active node {p}"));
                }
            }
        }
        let elems: Vec<&Element> = self.elements.iter().collect();
        for (i, e1) in elems.iter().enumerate() {
            for e2 in &elems[i + 1..] {
                if segments_properly_intersect(e1.segment(), e2.segment()) {
                    return err(format!("elements {e1} and {e2} intersect"));
                }
            }
        }
        Ok(())
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.nodes.iter().copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.elements.iter().copied()
    }

    pub fn contains_node(&self, p: Point) -> bool {
        self.nodes.contains(&p)
    }

    pub fn contains_element(&self, e: &Element) -> bool {
        self.elements.contains(e)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub(crate) fn insert_node(&mut self, p: Point) {
        self.nodes.insert(p);
    }

    pub(crate) fn insert_element(&mut self, e: Element) {
        self.elements.insert(e);
    }

    pub(crate) fn remove_element(&mut self, e: &Element) {
        self.elements.remove(e);
    }
}

/// Total material volume: `Σ area · length` over all members.
pub fn volume(c: &Configuration, p: &ElementProperties) -> f64 {
    c.elements().map(|e| p.area * e.length()).sum()
}

/// Planar counting rule for static determinacy: `m + r = 2n`, with `m`
/// members, `n` active nodes, and `r` the restrained degrees of freedom of
/// supports sitting on *active* nodes. Supports on unreached grid points do
/// not count; intermediate configurations must stand on their own.
pub fn is_statically_determinate(c: &Configuration, d: &DesignDomain) -> bool {
    let m = c.element_count() as u64;
    let n = c.node_count() as u64;
    let r: u64 = c.active_nodes().map(|p| d.restrained_dofs_at(p) as u64).sum();
    m + r == 2 * n
}

/// Order-insensitive 256-bit digest of a configuration's element set.
///
/// Two configurations with the same members always produce the same key, so
/// the key can index caches of finite-element results. The empty
/// configuration hashes to the digest of the empty byte string,
/// `e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConfigKey([u8; 32]);

impl std::fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Canonical digest of the sorted element set.
pub fn config_key(c: &Configuration) -> ConfigKey {
    let mut hasher = Sha256::new();
    for e in c.elements() {
        for v in [e.a().x, e.a().y, e.b().x, e.b().y] {
            hasher.update(v.to_le_bytes());
        }
    }
    ConfigKey(hasher.finalize().into())
}
