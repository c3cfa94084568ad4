//! Generative grammar for truss synthesis: enumeration and application of
//! the two legal operators.
//!
//! An action picks an inactive grid node, an existing member, and an
//! operator. `D` keeps the member and joins the new node to both of its
//! endpoints; `T` removes the member first and joins the new node to both
//! former endpoints plus one more active node. Either way a valid successor
//! gains exactly one node and two members net, which preserves the
//! determinacy count `m + r = 2n`. Because an activated support would add
//! restraints and break that count, supported grid points are never offered
//! as new nodes.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    segment_covers_node, segment_length, segment_length_sq, segment_touches_region,
    segments_properly_intersect, Point, Segment,
};
use crate::model::{volume, Configuration, DesignDomain, Element, ElementProperties};

#[derive(Debug, thiserror::Error)]
pub enum GrammarError {
    #[error("illegal action: {0}")]
    IllegalAction(String),
}

/// The two grammar operators.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Operator {
    /// Add the new node and connect it to both endpoints of the selected
    /// element, removing nothing.
    D,
    /// Remove the selected element, then connect the new node to both of its
    /// former endpoints and to a third active node.
    T,
}

/// One grammar move: `(inactive node, existing element, operator)`, plus the
/// third connection target for `T`.
///
/// The ordering is the canonical enumeration order: node first (row-major),
/// then element, then operator (`D` before `T`), then third node.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Action {
    pub node: Point,
    pub element: Element,
    pub op: Operator,
    pub t_third: Option<Point>,
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.op {
            Operator::D => write!(f, "D {} on {}", self.node, self.element),
            Operator::T => write!(
                f,
                "T {} on {} with {}",
                self.node,
                self.element,
                self.t_third.map(|p| p.to_string()).unwrap_or_default()
            ),
        }
    }
}

/// The members an action would add, and the one it would remove.
struct Edits {
    added: [Element; 3],
    n_added: usize,
    removed: Option<Element>,
}

impl Edits {
    fn added(&self) -> &[Element] {
        &self.added[..self.n_added]
    }
}

/// Structural decomposition of an action against a configuration. Errors on
/// anything that is ill-formed regardless of geometry: active node chosen,
/// missing element, bad third node.
fn edits_for(c: &Configuration, a: &Action) -> Result<Edits, GrammarError> {
    let err = |m: String| Err(GrammarError::IllegalAction(m));
    if c.contains_node(a.node) {
        return err(format!("node {} is already active", a.node));
    }
    if !c.contains_element(&a.element) {
        return err(format!("element {} is not in the configuration", a.element));
    }
    let (u, v) = a.element.endpoints();
    let join = |to: Point| Element::new(a.node, to).expect("new node is distinct");
    match a.op {
        Operator::D => {
            if a.t_third.is_some() {
                return err("D actions carry no third node".into());
            }
            Ok(Edits { added: [join(u), join(v), join(u)], n_added: 2, removed: None })
        }
        Operator::T => {
            let Some(w) = a.t_third else {
                return err("T actions require a third node".into());
            };
            if w == u || w == v {
                return err(format!("third node {w} must differ from the element endpoints"));
            }
            if !c.contains_node(w) {
                return err(format!("third node {w} is not active"));
            }
            Ok(Edits {
                added: [join(u), join(v), join(w)],
                n_added: 3,
                removed: Some(a.element),
            })
        }
    }
}

/// Geometric legality of the edits against the configuration: new members
/// may not cross or overlap surviving members or each other, may not pass
/// over any node of the successor, and no surviving member may pass over
/// the new node.
fn edits_geometry_ok(c: &Configuration, node: Point, edits: &Edits) -> bool {
    let survives = |e: &Element| edits.removed.as_ref() != Some(e);
    for existing in c.elements() {
        if !survives(&existing) {
            continue;
        }
        if segment_covers_node(existing.segment(), node) {
            return false;
        }
        for add in edits.added() {
            if segments_properly_intersect(existing.segment(), add.segment()) {
                return false;
            }
        }
    }
    for (i, add) in edits.added().iter().enumerate() {
        for other in &edits.added()[i + 1..] {
            if segments_properly_intersect(add.segment(), other.segment()) {
                return false;
            }
        }
        for w in c.active_nodes() {
            if !add.touches(w) && segment_covers_node(add.segment(), w) {
                return false;
            }
        }
    }
    true
}

/// Domain-level legality: grid bounds, passive regions, member length cap,
/// volume budget, and preservation of the determinacy count.
fn edits_domain_ok(
    c: &Configuration,
    d: &DesignDomain,
    p: &ElementProperties,
    node: Point,
    edits: &Edits,
    base_volume: f64,
    base_restrained: u64,
) -> bool {
    if !d.contains(node) {
        return false;
    }
    // Counting rule on the successor: (m+2) + r' = 2(n+1).
    let m2 = c.element_count() as u64 + 2;
    let n2 = c.node_count() as u64 + 1;
    let r2 = base_restrained + d.restrained_dofs_at(node) as u64;
    if m2 + r2 != 2 * n2 {
        return false;
    }
    if let Some(lmax) = d.max_element_length {
        let cap = lmax * lmax;
        for add in edits.added() {
            if segment_length_sq(add.segment()) as f64 > cap {
                return false;
            }
        }
    }
    for add in edits.added() {
        for region in &d.passive_regions {
            if segment_touches_region(add.segment(), region) {
                return false;
            }
        }
    }
    if let Some(v_max) = d.v_max {
        let added: f64 = edits.added().iter().map(|e| segment_length(e.segment())).sum();
        let removed = edits.removed.map(|e| e.length()).unwrap_or(0.0);
        if base_volume + p.area * (added - removed) > v_max {
            return false;
        }
    }
    true
}

/// Enumerates every action whose application yields a valid, statically
/// determinate successor, in canonical order. May be empty (dead end).
pub fn enumerate_actions(
    c: &Configuration,
    d: &DesignDomain,
    p: &ElementProperties,
) -> Vec<Action> {
    let base_volume = volume(c, p);
    let base_restrained: u64 =
        c.active_nodes().map(|q| d.restrained_dofs_at(q) as u64).sum();
    let mut out = Vec::new();

    // With a member length cap, only nodes near the structure can connect;
    // skipping the rest makes enumeration affordable on large grids.
    let reach = d.max_element_length.map(|lmax| {
        let r = lmax.ceil() as i64;
        let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for q in c.active_nodes() {
            x0 = x0.min(q.x);
            y0 = y0.min(q.y);
            x1 = x1.max(q.x);
            y1 = y1.max(q.y);
        }
        (x0 - r, y0 - r, x1 + r, y1 + r)
    });

    for node in d.grid_points() {
        if let Some((x0, y0, x1, y1)) = reach {
            if node.x < x0 || node.x > x1 || node.y < y0 || node.y > y1 {
                continue;
            }
        }
        if c.contains_node(node) {
            continue;
        }
        // A supported node would change the restraint count; a node strictly
        // inside a passive region cannot connect to anything.
        if d.restrained_dofs_at(node) > 0 {
            continue;
        }
        if d.passive_regions.iter().any(|r| r.strictly_contains(node)) {
            continue;
        }
        // Cheap length pre-filter: both mandatory joins must fit the cap.
        let length_ok = |to: Point| match d.max_element_length {
            Some(lmax) => {
                segment_length_sq(Segment::new(node, to)) as f64 <= lmax * lmax
            }
            None => true,
        };
        for element in c.elements() {
            let (u, v) = element.endpoints();
            if !(length_ok(u) && length_ok(v)) {
                continue;
            }
            let d_action = Action { node, element, op: Operator::D, t_third: None };
            push_if_legal(c, d, p, d_action, base_volume, base_restrained, &mut out);
            for w in c.active_nodes() {
                if w == u || w == v || !length_ok(w) {
                    continue;
                }
                let t_action =
                    Action { node, element, op: Operator::T, t_third: Some(w) };
                push_if_legal(c, d, p, t_action, base_volume, base_restrained, &mut out);
            }
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]), "enumeration must be sorted");
    out
}

fn push_if_legal(
    c: &Configuration,
    d: &DesignDomain,
    p: &ElementProperties,
    a: Action,
    base_volume: f64,
    base_restrained: u64,
    out: &mut Vec<Action>,
) {
    let Ok(edits) = edits_for(c, &a) else { return };
    if edits_geometry_ok(c, a.node, &edits)
        && edits_domain_ok(c, d, p, a.node, &edits, base_volume, base_restrained)
    {
        out.push(a);
    }
}

/// Full legality check for a single action: structure, geometry, and domain
/// constraints. Equivalent to membership in [`enumerate_actions`] without
/// enumerating the rest.
pub fn action_is_legal(
    c: &Configuration,
    d: &DesignDomain,
    p: &ElementProperties,
    a: &Action,
) -> bool {
    let Ok(edits) = edits_for(c, a) else { return false };
    let base_volume = volume(c, p);
    let base_restrained: u64 =
        c.active_nodes().map(|q| d.restrained_dofs_at(q) as u64).sum();
    edits_geometry_ok(c, a.node, &edits)
        && edits_domain_ok(c, d, p, a.node, &edits, base_volume, base_restrained)
}

/// Applies an action, producing the successor configuration.
///
/// Checks the action's structural and geometric legality against the
/// configuration; domain-level constraints (passive regions, budgets) are
/// the caller's business via [`enumerate_actions`].
pub fn apply_action(c: &Configuration, a: &Action) -> Result<Configuration, GrammarError> {
    let edits = edits_for(c, a)?;
    if !edits_geometry_ok(c, a.node, &edits) {
        return Err(GrammarError::IllegalAction(format!(
            "action {a} violates geometric constraints"
        )));
    }
    let mut next = c.clone();
    if let Some(removed) = &edits.removed {
        next.remove_element(removed);
    }
    next.insert_node(a.node);
    for e in edits.added() {
        next.insert_element(*e);
    }
    debug_assert!(next.validate().is_ok());
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Support;

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn el(a: (i64, i64), b: (i64, i64)) -> Element {
        Element::new(pt(a.0, a.1), pt(b.0, b.1)).unwrap()
    }

    fn triangle() -> Configuration {
        Configuration::new(
            [pt(0, 0), pt(1, 0), pt(0, 1)],
            [el((0, 0), (1, 0)), el((1, 0), (0, 1)), el((0, 1), (0, 0))],
        )
        .unwrap()
    }

    fn toy_domain(width: i64, height: i64) -> DesignDomain {
        DesignDomain {
            width,
            height,
            supports: vec![
                Support { at: pt(0, 0), fix_x: true, fix_y: true },
                Support { at: pt(1, 0), fix_x: false, fix_y: true },
            ],
            loads: vec![],
            passive_regions: vec![],
            v_max: None,
            horizon: Some(2),
            target_node: None,
            max_element_length: None,
            self_weight_density: 0.0,
        }
    }

    fn props() -> ElementProperties {
        ElementProperties { young_modulus: 1000.0, area: 1.0 }
    }

    #[test]
    fn unit_grid_enumeration() {
        // On the 2×2 grid only the hypotenuse admits the corner node: the
        // diagonal to (0,0) would cross it for the other two elements.
        let actions = enumerate_actions(&triangle(), &toy_domain(2, 2), &props());
        assert_eq!(actions.len(), 2);
        assert_eq!(actions[0].op, Operator::D);
        assert_eq!(actions[0].node, pt(1, 1));
        assert_eq!(actions[0].element, el((1, 0), (0, 1)));
        assert_eq!(actions[1].op, Operator::T);
        assert_eq!(actions[1].t_third, Some(pt(0, 0)));
    }

    #[test]
    fn d_operator_adds_two_members() {
        let a = Action {
            node: pt(1, 1),
            element: el((1, 0), (0, 1)),
            op: Operator::D,
            t_third: None,
        };
        let next = apply_action(&triangle(), &a).unwrap();
        assert_eq!(next.node_count(), 4);
        assert_eq!(next.element_count(), 5);
        assert!(next.contains_element(&el((1, 1), (1, 0))));
        assert!(next.contains_element(&el((1, 1), (0, 1))));
        assert!(next.contains_element(&el((1, 0), (0, 1))));
    }

    #[test]
    fn t_operator_swaps_and_adds_three() {
        let a = Action {
            node: pt(1, 1),
            element: el((1, 0), (0, 1)),
            op: Operator::T,
            t_third: Some(pt(0, 0)),
        };
        let next = apply_action(&triangle(), &a).unwrap();
        assert_eq!(next.node_count(), 4);
        assert_eq!(next.element_count(), 5);
        assert!(!next.contains_element(&el((1, 0), (0, 1))));
        assert!(next.contains_element(&el((1, 1), (0, 0))));
    }

    #[test]
    fn active_node_is_rejected() {
        let a = Action {
            node: pt(0, 0),
            element: el((1, 0), (0, 1)),
            op: Operator::D,
            t_third: None,
        };
        assert!(matches!(
            apply_action(&triangle(), &a),
            Err(GrammarError::IllegalAction(_))
        ));
    }

    #[test]
    fn exhausted_volume_budget_empties_the_action_set() {
        let mut d = toy_domain(3, 3);
        d.v_max = Some(volume(&triangle(), &props()) + 0.5);
        assert!(enumerate_actions(&triangle(), &d, &props()).is_empty());
    }

    #[test]
    fn passive_region_blocks_interior_nodes() {
        let mut d = toy_domain(4, 4);
        d.passive_regions.push(crate::geometry::Rect::new(1, 1, 3, 3));
        let actions = enumerate_actions(&triangle(), &d, &props());
        assert!(actions.iter().all(|a| !(a.node == pt(2, 2))));
    }

    #[test]
    fn supported_inactive_nodes_are_never_chosen() {
        let mut d = toy_domain(3, 3);
        d.supports.push(Support { at: pt(2, 0), fix_x: true, fix_y: true });
        let actions = enumerate_actions(&triangle(), &d, &props());
        assert!(!actions.is_empty());
        assert!(actions.iter().all(|a| a.node != pt(2, 0)));
    }

    #[test]
    fn every_action_yields_a_determinate_valid_successor() {
        let d = toy_domain(3, 3);
        let c = triangle();
        let actions = enumerate_actions(&c, &d, &props());
        assert!(!actions.is_empty());
        for a in &actions {
            let next = apply_action(&c, a).unwrap();
            next.validate().unwrap();
            assert_eq!(next.node_count(), c.node_count() + 1);
            assert_eq!(next.element_count(), c.element_count() + 2);
            assert!(crate::model::is_statically_determinate(&next, &d));
        }
    }

    #[test]
    fn max_element_length_prunes_long_members() {
        let mut d = toy_domain(5, 2);
        d.max_element_length = Some(1.5);
        let actions = enumerate_actions(&triangle(), &d, &props());
        for a in &actions {
            let next = apply_action(&triangle(), a).unwrap();
            for e in next.elements() {
                assert!(e.length() <= 1.5 + 1e-12);
            }
        }
    }
}
