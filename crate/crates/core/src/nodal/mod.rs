//! Nodal domains: connected components of `{f != 0}` on the sampled grid.
//!
//! Labelling is cell based. A node whose value exceeds the zero tolerance in
//! absolute value is a cell of sign `sign(f)`; same-sign cells are joined
//! across the four chart neighbours (wrapping on periodic axes) and across
//! polar nodes, which touch their whole adjacent row.

mod distance;
mod union_find;

use std::io::{self, Write};

use crate::grid::{GridField, PoleEnd, Resolution};
use crate::textfmt::sig12;
use crate::{Error, Result};
use distance::{distance_to_foreign, NO_LABEL};
use union_find::UnionFind;

/// Default zero tolerance relative to `max |f|`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;
/// Domains with `m_A <= DUST_FACTOR * tolerance` are dropped.
pub const DUST_FACTOR: f64 = 10.0;

/// One nodal domain.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalDomain {
    pub label: usize,
    pub sign: i8,
    /// Unified cell ids: `0..nu*nv` are grid nodes, later ids are polar
    /// nodes in [`GridField::polar`] order.
    pub cells: Vec<usize>,
    /// `max |f|` over the domain.
    pub m_a: f64,
    pub area: f64,
    pub inradius: f64,
}

/// The labelled nodal domains of one field.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalDomainSet {
    pub domains: Vec<NodalDomain>,
    pub zero_tolerance: f64,
    pub resolution: Resolution,
}

impl NodalDomainSet {
    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn max_extremum(&self) -> f64 {
        self.domains.iter().fold(0.0, |m, d| m.max(d.m_a))
    }

    pub fn total_area(&self) -> f64 {
        self.domains.iter().map(|d| d.area).sum()
    }

    /// `label,sign,m_A,area,inradius,cell_count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "label,sign,m_A,area,inradius,cell_count")?;
        for d in &self.domains {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                d.label,
                d.sign,
                sig12(d.m_a),
                sig12(d.area),
                sig12(d.inradius),
                d.cells.len()
            )?;
        }
        Ok(())
    }
}

/// Unified-id adjacency of the cell graph.
fn for_each_edge(gf: &GridField, mut visit: impl FnMut(usize, usize)) {
    let res = gf.resolution();
    let (nu, nv) = (res.nu, res.nv);
    let (up, vp) = (gf.u_periodic(), gf.v_periodic());
    for i in 0..nu {
        for j in 0..nv {
            let id = gf.index(i, j);
            if i + 1 < nu {
                visit(id, gf.index(i + 1, j));
            } else if up && nu > 1 {
                visit(id, gf.index(0, j));
            }
            if j + 1 < nv {
                visit(id, gf.index(i, j + 1));
            } else if vp && nv > 1 {
                visit(id, gf.index(i, 0));
            }
        }
    }
    for (k, p) in gf.polar().iter().enumerate() {
        let row = match p.end {
            PoleEnd::Low => 0,
            PoleEnd::High => nu - 1,
        };
        for j in 0..nv {
            visit(nu * nv + k, gf.index(row, j));
        }
    }
}

fn cell_value(gf: &GridField, id: usize) -> (f64, f64) {
    let n = gf.nodes().len();
    if id < n {
        let node = &gf.nodes()[id];
        (node.f, node.weight)
    } else {
        (gf.polar()[id - n].f, 0.0)
    }
}

/// Labels the nodal domains of `gf`.
///
/// `zero_tolerance` defaults to `1e-9 * max |f|`; cells with
/// `|f| <= zero_tolerance` belong to no domain. An all-zero field yields an
/// empty set.
pub fn extract_domains(gf: &GridField, zero_tolerance: Option<f64>) -> Result<NodalDomainSet> {
    let tol = match zero_tolerance {
        Some(t) if !(t >= 0.0) => return Err(Error::Config(format!("zero tolerance must be >= 0, got {t}"))),
        Some(t) => t,
        None => DEFAULT_RELATIVE_TOLERANCE * gf.max_abs(),
    };
    let total = gf.nodes().len() + gf.polar().len();
    let sign_of = |id: usize| -> i8 {
        let f = cell_value(gf, id).0;
        if f > tol {
            1
        } else if f < -tol {
            -1
        } else {
            0
        }
    };
    let signs: Vec<i8> = (0..total).map(sign_of).collect();

    let mut uf = UnionFind::new(total);
    for_each_edge(gf, |a, b| {
        if signs[a] != 0 && signs[a] == signs[b] {
            uf.union(a, b);
        }
    });

    // Roots are smallest members, so ascending ids meet each root first.
    let mut root_slot = vec![usize::MAX; total];
    let mut domains: Vec<NodalDomain> = Vec::new();
    for id in 0..total {
        if signs[id] == 0 {
            continue;
        }
        let r = uf.find(id);
        if root_slot[r] == usize::MAX {
            root_slot[r] = domains.len();
            domains.push(NodalDomain {
                label: 0,
                sign: signs[id],
                cells: Vec::new(),
                m_a: 0.0,
                area: 0.0,
                inradius: 0.0,
            });
        }
        let d = &mut domains[root_slot[r]];
        let (f, w) = cell_value(gf, id);
        d.cells.push(id);
        d.m_a = d.m_a.max(f.abs());
        d.area += w;
    }
    domains.retain(|d| d.m_a > DUST_FACTOR * tol);

    let mut labels = vec![NO_LABEL; total];
    for (k, d) in domains.iter_mut().enumerate() {
        d.label = k;
        for &c in &d.cells {
            labels[c] = k as u32;
        }
    }
    let dist = distance_to_foreign(gf, &labels);
    for d in &mut domains {
        d.inradius = d.cells.iter().fold(0.0, |m, &c| m.max(dist[c]));
    }
    Ok(NodalDomainSet { domains, zero_tolerance: tol, resolution: gf.resolution() })
}

/// `sum_A m_A^q`.
pub fn extrema_moments(nds: &NodalDomainSet, q: f64) -> f64 {
    nds.domains.iter().map(|d| d.m_a.powf(q)).sum()
}

/// Number of domains with `m_A >= a`.
pub fn count_above(nds: &NodalDomainSet, a: f64) -> usize {
    nds.domains.iter().filter(|d| d.m_a >= a).count()
}

/// Radius of the largest inscribed metric disc of one domain, from a
/// chamfer distance transform of its cell mask.
pub fn inradius(domain: &NodalDomain, gf: &GridField) -> f64 {
    let total = gf.nodes().len() + gf.polar().len();
    let mut labels = vec![NO_LABEL; total];
    for &c in &domain.cells {
        labels[c] = 0;
    }
    let dist = distance_to_foreign(gf, &labels);
    domain.cells.iter().fold(0.0, |m, &c| m.max(dist[c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{FieldExpr, ModeSpec, SurfaceModel, TorusBranch};
    use std::f64::consts::PI;

    fn torus(n: u32) -> GridField {
        let f = FieldExpr::mode(ModeSpec::torus(n, n, TorusBranch::SinSin).unwrap()).normalized();
        GridField::sample(&f, None).unwrap()
    }

    #[test]
    fn torus_cells() {
        let gf = torus(2);
        let nds = extract_domains(&gf, None).unwrap();
        assert_eq!(nds.len(), 16);
        for d in &nds.domains {
            assert!((d.m_a - 1.0 / PI).abs() < 1e-3);
        }
        let pos = nds.domains.iter().filter(|d| d.sign > 0).count();
        assert_eq!(pos, 8);
    }

    #[test]
    fn zero_field_is_empty() {
        let gf = GridField::sample(&FieldExpr::zero(SurfaceModel::FlatTorus), None).unwrap();
        let nds = extract_domains(&gf, None).unwrap();
        assert!(nds.is_empty());
        assert_eq!(extrema_moments(&nds, 1.0), 0.0);
        assert_eq!(count_above(&nds, 0.1), 0);
    }

    #[test]
    fn negative_tolerance_rejected() {
        assert!(extract_domains(&torus(1), Some(-1.0)).is_err());
    }

    #[test]
    fn paraboloid_single_domain() {
        let gf = GridField::sample(&FieldExpr::disc_paraboloid(), None).unwrap();
        let nds = extract_domains(&gf, None).unwrap();
        assert_eq!(nds.len(), 1);
        assert_eq!(nds.domains[0].m_a, 1.0);
        assert!((nds.domains[0].area - PI).abs() < 1e-9);
        let step = 1.0 / gf.resolution().nu as f64;
        assert!((nds.domains[0].inradius - 1.0).abs() <= step);
        assert!((inradius(&nds.domains[0], &gf) - nds.domains[0].inradius).abs() < 1e-12);
    }

    #[test]
    fn huge_tolerance_discards_everything() {
        let nds = extract_domains(&torus(1), Some(1.0)).unwrap();
        assert!(nds.is_empty());
    }

    #[test]
    fn domain_csv_layout() {
        let nds = extract_domains(&torus(1), None).unwrap();
        let mut buf = Vec::new();
        nds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("label,sign,m_A,area,inradius,cell_count\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
