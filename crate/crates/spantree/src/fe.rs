//! Linear static analysis of planar pin-jointed trusses by the direct
//! stiffness method.
//!
//! Each member contributes the classical axial-bar stiffness in global
//! coordinates, `(EA/L)·[c² cs; cs s²]` blocks with `c = cosθ`, `s = sinθ`.
//! Supports impose homogeneous Dirichlet conditions by row/column
//! elimination, and the reduced symmetric system is solved with a dense
//! LDLᵀ factorization. Systems here stay small (a few hundred degrees of
//! freedom at most), so dense is the right tool.

use std::collections::BTreeMap;

use crate::geometry::Point;
use crate::model::{Configuration, DesignDomain, ElementProperties};

/// Relative pivot threshold: a factorization pivot below
/// `PIVOT_RTOL · max(diag K)` signals a mechanism or a disconnected load
/// path. Scale-relative, so it holds up across dimensionless unit choices.
pub const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum FeError {
    /// The stiffness matrix is singular: the configuration contains a
    /// mechanism or the load cannot reach a support.
    #[error("unstable structure: stiffness pivot {pivot:.3e} below threshold {threshold:.3e}")]
    UnstableStructure { pivot: f64, threshold: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Nodal force vector, `node → (fx, fy)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadVector(BTreeMap<Point, (f64, f64)>);

impl LoadVector {
    pub fn new() -> Self {
        LoadVector(BTreeMap::new())
    }

    /// Accumulates a force contribution at `p`.
    pub fn add(&mut self, p: Point, fx: f64, fy: f64) {
        let entry = self.0.entry(p).or_insert((0.0, 0.0));
        entry.0 += fx;
        entry.1 += fy;
    }

    pub fn get(&self, p: Point) -> (f64, f64) {
        self.0.get(&p).copied().unwrap_or((0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, (f64, f64))> + '_ {
        self.0.iter().map(|(p, f)| (*p, *f))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean norm over all entries.
    pub fn norm(&self) -> f64 {
        self.0
            .values()
            .map(|(fx, fy)| fx * fx + fy * fy)
            .sum::<f64>()
            .sqrt()
    }

    /// Merges another load vector into this one.
    pub fn merge(&mut self, other: &LoadVector) {
        for (p, (fx, fy)) in other.iter() {
            self.add(p, fx, fy);
        }
    }

    /// External loads of a domain, as a load vector.
    pub fn from_domain(d: &DesignDomain) -> Self {
        let mut lv = LoadVector::new();
        for l in &d.loads {
            lv.add(l.at, l.fx, l.fy);
        }
        lv
    }
}

/// Nodal displacement field, `node → (ux, uy)`. Fixed DOFs are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DisplacementField(BTreeMap<Point, (f64, f64)>);

impl DisplacementField {
    pub fn get(&self, p: Point) -> (f64, f64) {
        self.0.get(&p).copied().unwrap_or((0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, (f64, f64))> + '_ {
        self.0.iter().map(|(p, u)| (*p, *u))
    }
}

/// The design objective: largest absolute displacement component over all
/// nodal degrees of freedom.
pub fn max_abs_displacement(u: &DisplacementField) -> f64 {
    u.iter()
        .flat_map(|(_, (ux, uy))| [ux.abs(), uy.abs()])
        .fold(0.0, f64::max)
}

/// Gravity load of the members themselves: each element of length `L` lumps
/// half its weight `density · A · L` onto each end node, pointing down. The
/// total downward load equals `density · volume`.
pub fn self_weight_loads(
    c: &Configuration,
    p: &ElementProperties,
    density: f64,
) -> LoadVector {
    let mut lv = LoadVector::new();
    if density == 0.0 {
        return lv;
    }
    for e in c.elements() {
        let half = 0.5 * density * p.area * e.length();
        lv.add(e.a(), 0.0, -half);
        lv.add(e.b(), 0.0, -half);
    }
    lv
}

/// Solves `K U = F` for the free degrees of freedom of `c` under `loads`,
/// with supports from `d` imposed as homogeneous Dirichlet conditions.
///
/// Errors with [`FeError::UnstableStructure`] when the reduced stiffness
/// matrix is (numerically) singular, and [`FeError::InvalidInput`] when a
/// load sits on an inactive node.
pub fn solve_static(
    c: &Configuration,
    p: &ElementProperties,
    loads: &LoadVector,
    d: &DesignDomain,
) -> Result<DisplacementField, FeError> {
    for (at, _) in loads.iter() {
        if !c.contains_node(at) {
            return Err(FeError::InvalidInput(format!("load on inactive node {at}")));
        }
    }

    let nodes: Vec<Point> = c.active_nodes().collect();
    let index: BTreeMap<Point, usize> = nodes.iter().enumerate().map(|(i, p)| (*p, i)).collect();

    // Global DOF -> free-slot mapping (usize::MAX marks a fixed DOF).
    let mut free_slot = vec![usize::MAX; 2 * nodes.len()];
    let mut n_free = 0;
    for (i, node) in nodes.iter().enumerate() {
        let (fix_x, fix_y) = d
            .supports
            .iter()
            .filter(|s| s.at == *node)
            .fold((false, false), |acc, s| (acc.0 || s.fix_x, acc.1 || s.fix_y));
        for (k, fixed) in [(2 * i, fix_x), (2 * i + 1, fix_y)] {
            if !fixed {
                free_slot[k] = n_free;
                n_free += 1;
            }
        }
    }

    let mut k_ff = vec![0.0; n_free * n_free];
    let mut scatter = |dofs: &[usize; 4], ke: &[[f64; 4]; 4]| {
        for (r, &dr) in dofs.iter().enumerate() {
            let fr = free_slot[dr];
            if fr == usize::MAX {
                continue;
            }
            for (cidx, &dc) in dofs.iter().enumerate() {
                let fc = free_slot[dc];
                if fc == usize::MAX {
                    continue;
                }
                k_ff[fr * n_free + fc] += ke[r][cidx];
            }
        }
    };

    for e in c.elements() {
        let (a, b) = e.endpoints();
        let (ia, ib) = (index[&a], index[&b]);
        let length = e.length();
        let cos = (b.x - a.x) as f64 / length;
        let sin = (b.y - a.y) as f64 / length;
        let k = p.young_modulus * p.area / length;
        let (cc, cs, ss) = (cos * cos, cos * sin, sin * sin);
        let block = [[cc, cs], [cs, ss]];
        let mut ke = [[0.0; 4]; 4];
        for r in 0..2 {
            for cidx in 0..2 {
                let v = k * block[r][cidx];
                ke[r][cidx] = v;
                ke[r + 2][cidx + 2] = v;
                ke[r][cidx + 2] = -v;
                ke[r + 2][cidx] = -v;
            }
        }
        scatter(&[2 * ia, 2 * ia + 1, 2 * ib, 2 * ib + 1], &ke);
    }

    let mut f = vec![0.0; n_free];
    for (at, (fx, fy)) in loads.iter() {
        let i = index[&at];
        for (dof, v) in [(2 * i, fx), (2 * i + 1, fy)] {
            let slot = free_slot[dof];
            if slot != usize::MAX {
                f[slot] += v;
            }
        }
    }

    ldlt_solve_in_place(&mut k_ff, &mut f, n_free)?;

    let mut field = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        let ux = free_slot[2 * i];
        let uy = free_slot[2 * i + 1];
        field.insert(
            *node,
            (
                if ux == usize::MAX { 0.0 } else { f[ux] },
                if uy == usize::MAX { 0.0 } else { f[uy] },
            ),
        );
    }
    Ok(DisplacementField(field))
}

/// Dense LDLᵀ factorization and solve for a symmetric matrix, in place.
/// No pivoting: stiffness matrices of stable trusses are positive definite,
/// and a pivot falling below `PIVOT_RTOL · max(diag)` is exactly the
/// instability signal the caller wants.
fn ldlt_solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> Result<(), FeError> {
    if n == 0 {
        return Ok(());
    }
    let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0_f64, f64::max);
    let threshold = PIVOT_RTOL * max_diag;
    if !(max_diag > 0.0) {
        return Err(FeError::UnstableStructure { pivot: max_diag, threshold });
    }

    // Factor: A = L·D·Lᵀ with unit lower-triangular L stored below the
    // diagonal and D on the diagonal.
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            let ljk = a[j * n + k];
            d -= ljk * ljk * a[k * n + k];
        }
        if !(d > threshold) {
            return Err(FeError::UnstableStructure { pivot: d, threshold });
        }
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k] * a[k * n + k];
            }
            a[i * n + j] = v / d;
        }
    }

    // Forward substitution (L y = b), diagonal scale, back substitution.
    for i in 0..n {
        for k in 0..i {
            b[i] = b[i] - a[i * n + k] * b[k];
        }
    }
    for i in 0..n {
        b[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            b[i] = b[i] - a[k * n + i] * b[k];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Element, Support};

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn props() -> ElementProperties {
        ElementProperties { young_modulus: 1000.0, area: 1.0 }
    }

    fn domain(supports: Vec<Support>) -> DesignDomain {
        DesignDomain {
            width: 4,
            height: 4,
            supports,
            loads: vec![],
            passive_regions: vec![],
            v_max: None,
            horizon: Some(1),
            target_node: None,
            max_element_length: None,
            self_weight_density: 0.0,
        }
    }

    #[test]
    fn single_bar_axial_formula() {
        // u = FL/EA = 10·1/(1000·1) = 0.01
        let c = Configuration::new(
            [pt(0, 0), pt(1, 0)],
            [Element::new(pt(0, 0), pt(1, 0)).unwrap()],
        )
        .unwrap();
        let d = domain(vec![
            Support { at: pt(0, 0), fix_x: true, fix_y: true },
            Support { at: pt(1, 0), fix_x: false, fix_y: true },
        ]);
        let mut loads = LoadVector::new();
        loads.add(pt(1, 0), 10.0, 0.0);
        let u = solve_static(&c, &props(), &loads, &d).unwrap();
        assert!((u.get(pt(1, 0)).0 - 0.01).abs() < 1e-12);
        assert_eq!(u.get(pt(0, 0)), (0.0, 0.0));
    }

    #[test]
    fn two_bar_apex_matches_hand_assembly() {
        // Both bars have L = √2 and direction cosines ±1/√2. The free system
        // reduces to the apex 2×2 block; assembling it by hand:
        //   K = (EA/L)·([[c²,cs],[cs,s²]] + [[c²,-cs],[-cs,s²]])
        //     = (EA/L)·[[1, 0], [0, 1]]
        // so uy = fy / (EA/L) and ux = 0 by symmetry.
        let c = Configuration::new(
            [pt(0, 0), pt(2, 0), pt(1, 1)],
            [
                Element::new(pt(0, 0), pt(1, 1)).unwrap(),
                Element::new(pt(2, 0), pt(1, 1)).unwrap(),
            ],
        )
        .unwrap();
        let d = domain(vec![
            Support { at: pt(0, 0), fix_x: true, fix_y: true },
            Support { at: pt(2, 0), fix_x: true, fix_y: true },
        ]);
        let mut loads = LoadVector::new();
        loads.add(pt(1, 1), 0.0, -10.0);
        let u = solve_static(&c, &props(), &loads, &d).unwrap();

        let ea_over_l = 1000.0 / 2.0_f64.sqrt();
        let expected_uy = -10.0 / ea_over_l;
        let (ux, uy) = u.get(pt(1, 1));
        assert!((uy - expected_uy).abs() <= 1e-10 * expected_uy.abs());
        assert!(ux.abs() < 1e-14);
    }

    #[test]
    fn square_mechanism_is_rejected() {
        let c = Configuration::new(
            [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)],
            [
                Element::new(pt(0, 0), pt(1, 0)).unwrap(),
                Element::new(pt(1, 0), pt(1, 1)).unwrap(),
                Element::new(pt(1, 1), pt(0, 1)).unwrap(),
                Element::new(pt(0, 1), pt(0, 0)).unwrap(),
            ],
        )
        .unwrap();
        let d = domain(vec![
            Support { at: pt(0, 0), fix_x: true, fix_y: true },
            Support { at: pt(1, 0), fix_x: false, fix_y: true },
        ]);
        let mut loads = LoadVector::new();
        loads.add(pt(1, 1), 10.0, 0.0);
        match solve_static(&c, &props(), &loads, &d) {
            Err(FeError::UnstableStructure { .. }) => {}
            other => panic!("expected UnstableStructure, got {other:?}"),
        }
    }

    #[test]
    fn load_on_inactive_node_is_invalid_input() {
        let c = Configuration::new(
            [pt(0, 0), pt(1, 0)],
            [Element::new(pt(0, 0), pt(1, 0)).unwrap()],
        )
        .unwrap();
        let d = domain(vec![Support { at: pt(0, 0), fix_x: true, fix_y: true }]);
        let mut loads = LoadVector::new();
        loads.add(pt(3, 3), 1.0, 0.0);
        assert!(matches!(
            solve_static(&c, &props(), &loads, &d),
            Err(FeError::InvalidInput(_))
        ));
    }

    #[test]
    fn max_abs_displacement_examples() {
        let mut m = BTreeMap::new();
        assert_eq!(max_abs_displacement(&DisplacementField(m.clone())), 0.0);
        m.insert(pt(1, 0), (0.01, 0.0));
        assert_eq!(max_abs_displacement(&DisplacementField(m.clone())), 0.01);
        m.insert(pt(1, 1), (-0.003, 0.04));
        assert_eq!(max_abs_displacement(&DisplacementField(m)), 0.04);
    }

    #[test]
    fn self_weight_examples() {
        let one = Configuration::new(
            [pt(0, 0), pt(1, 0)],
            [Element::new(pt(0, 0), pt(1, 0)).unwrap()],
        )
        .unwrap();
        let lv = self_weight_loads(&one, &props(), 1.0);
        assert_eq!(lv.get(pt(0, 0)), (0.0, -0.5));
        assert_eq!(lv.get(pt(1, 0)), (0.0, -0.5));

        assert!(self_weight_loads(&one, &props(), 0.0).is_empty());

        let tri = Configuration::new(
            [pt(0, 0), pt(1, 0), pt(0, 1)],
            [
                Element::new(pt(0, 0), pt(1, 0)).unwrap(),
                Element::new(pt(1, 0), pt(0, 1)).unwrap(),
                Element::new(pt(0, 1), pt(0, 0)).unwrap(),
            ],
        )
        .unwrap();
        let lv = self_weight_loads(&tri, &props(), 1.0);
        let total: f64 = lv.iter().map(|(_, (_, fy))| -fy).sum();
        assert!((total - (2.0 + 2.0_f64.sqrt())).abs() < 1e-12);
    }
}
