//! Marching squares over the sampled lattice.
//!
//! The lattice is the grid itself plus, where the chart has a boundary, one
//! padded row or column evaluated on that boundary, so that loops around
//! Dirichlet domains close. Polar nodes become the apex of a triangle fan
//! over their adjacent row.
//!
//! A lattice point is inside when `f >= c`. Crossing points are roots of the
//! field along lattice edges, seeded by linear interpolation, and segments
//! are stitched by shared edge ids, so wrapped edges join automatically.

use std::collections::HashMap;
use std::f64::consts::TAU;

use super::Contour;
use crate::grid::{GridField, PoleEnd};
use crate::surfaces::{ChartPoint, FieldExpr, SurfaceModel};
use crate::Result;

#[derive(Debug, Clone, Copy)]
struct Pole {
    point: ChartPoint,
    f: f64,
    row: usize,
}

/// Lattice values for one sampled field, shared by every level of a sweep.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    expr: FieldExpr,
    u: Vec<f64>,
    v: Vec<f64>,
    vals: Vec<f64>,
    nu: usize,
    nv: usize,
    u_wrap: bool,
    v_wrap: bool,
    /// Low end (index 0) and high end (index 1) of the `u` axis.
    poles: [Option<Pole>; 2],
}

impl Lattice {
    pub(crate) fn new(gf: &GridField) -> Result<Self> {
        let model = gf.model();
        let expr = gf.expr().clone();
        let res = gf.resolution();
        let (gu, gv) = (gf.u_coords(), gf.v_coords());
        let (pad_u_lo, pad_u_hi, pad_v) = match model {
            SurfaceModel::EuclideanRectangle { .. } => (true, true, true),
            SurfaceModel::UnitDisc => (false, true, false),
            _ => (false, false, false),
        };
        let (au, av) = model.axes();
        let mut u = Vec::with_capacity(res.nu + 2);
        if pad_u_lo {
            u.push(au.lo);
        }
        u.extend_from_slice(gu);
        if pad_u_hi {
            u.push(au.hi);
        }
        let mut v = Vec::with_capacity(res.nv + 2);
        if pad_v {
            v.push(av.lo);
        }
        v.extend_from_slice(gv);
        if pad_v {
            v.push(av.hi);
        }
        let (nu, nv) = (u.len(), v.len());
        let i0 = usize::from(pad_u_lo);
        let j0 = usize::from(pad_v);
        let mut vals = Vec::with_capacity(nu * nv);
        for (i, &uu) in u.iter().enumerate() {
            for (j, &vv) in v.iter().enumerate() {
                let gi = i.checked_sub(i0).filter(|&k| k < res.nu);
                let gj = j.checked_sub(j0).filter(|&k| k < res.nv);
                let f = match (gi, gj) {
                    (Some(a), Some(b)) => gf.node(a, b).f,
                    _ => expr.eval(ChartPoint::new(uu, vv))?,
                };
                vals.push(f);
            }
        }
        let pole = |end: PoleEnd, row: usize| gf.pole(end).map(|(_, p)| Pole { point: p.point, f: p.f, row });
        Ok(Self {
            expr,
            u,
            v,
            vals,
            nu,
            nv,
            u_wrap: au.periodic,
            v_wrap: av.periodic,
            poles: [pole(PoleEnd::Low, 0), pole(PoleEnd::High, nu - 1)],
        })
    }

    /// `(min, max)` over lattice values and poles, boundary pads included.
    pub(crate) fn value_range(&self) -> (f64, f64) {
        self.vals
            .iter()
            .copied()
            .chain(self.poles.iter().flatten().map(|p| p.f))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f), hi.max(f)))
    }

    fn next_i(&self, i: usize) -> usize {
        if i + 1 == self.nu {
            0
        } else {
            i + 1
        }
    }

    fn next_j(&self, j: usize) -> usize {
        if j + 1 == self.nv {
            0
        } else {
            j + 1
        }
    }

    /// `u` of row `i + 1` seen from row `i`, unwrapped across the seam.
    fn u_after(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.u[0] + TAU
        } else {
            self.u[i + 1]
        }
    }

    fn v_after(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.v[0] + TAU
        } else {
            self.v[j + 1]
        }
    }

    fn h_edge(&self, i: usize, j: usize) -> u64 {
        3 * (i * self.nv + j) as u64
    }

    fn v_edge(&self, i: usize, j: usize) -> u64 {
        3 * (i * self.nv + j) as u64 + 1
    }

    fn spoke(&self, pole: usize, j: usize) -> u64 {
        (3 * self.nu * self.nv + pole * self.nv + j) as u64
    }

    /// Endpoints `(point, value)` of an edge in a fixed order.
    fn edge_ends(&self, id: u64) -> ((ChartPoint, f64), (ChartPoint, f64)) {
        let n = (3 * self.nu * self.nv) as u64;
        let at = |i: usize, j: usize| self.vals[i * self.nv + j];
        if id >= n {
            let rest = (id - n) as usize;
            let (k, j) = (rest / self.nv, rest % self.nv);
            let pole = self.poles[k].expect("spoke without pole");
            let row = pole.row;
            // The pole's own v is arbitrary; give it the spoke's v.
            (
                (ChartPoint::new(pole.point.u, self.v[j]), pole.f),
                (ChartPoint::new(self.u[row], self.v[j]), at(row, j)),
            )
        } else {
            let k = (id / 3) as usize;
            let (i, j) = (k / self.nv, k % self.nv);
            let a = (ChartPoint::new(self.u[i], self.v[j]), at(i, j));
            if id.is_multiple_of(3) {
                (a, (ChartPoint::new(self.u_after(i), self.v[j]), at(self.next_i(i), j)))
            } else {
                (a, (ChartPoint::new(self.u[i], self.v_after(j)), at(i, self.next_j(j))))
            }
        }
    }

    fn crossing(&self, id: u64, c: f64, model: SurfaceModel) -> Result<ChartPoint> {
        let ((pa, fa), (pb, fb)) = self.edge_ends(id);
        let at = |t: f64| ChartPoint::new(pa.u + t * (pb.u - pa.u), pa.v + t * (pb.v - pa.v));
        if fb == fa {
            return model.validate(at(0.5));
        }
        let t = ((c - fa) / (fb - fa)).clamp(0.0, 1.0);
        if (fa >= c) == (fb >= c) {
            return model.validate(at(t));
        }
        let t = self.refine(fa - c, fb - c, t, c, |t| model.validate(at(t)))?;
        model.validate(at(t))
    }

    /// Illinois iteration for the root of `f - c` on `[0, 1]`, where `ga`
    /// and `gb` are the end values of `f - c` and `t0` the linear guess.
    fn refine(&self, ga: f64, gb: f64, t0: f64, c: f64, point: impl Fn(f64) -> Result<ChartPoint>) -> Result<f64> {
        let tol = 1e-13 * (ga.abs() + gb.abs());
        let (mut a, mut b, mut fa, mut fb) = (0.0, 1.0, ga, gb);
        let mut t = t0;
        let mut side = 0i8;
        for _ in 0..40 {
            let ft = self.expr.eval(point(t)?)? - c;
            if ft.abs() <= tol {
                break;
            }
            if (ft > 0.0) == (fa > 0.0) {
                a = t;
                fa = ft;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = t;
                fb = ft;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if b - a <= 1e-14 {
                break;
            }
            t = (a * fb - b * fa) / (fb - fa);
        }
        Ok(t)
    }

    /// Contours of `{f = c}`, closed loops first-in-scan order.
    pub(crate) fn extract(&self, c: f64) -> Result<Vec<Contour>> {
        let inside: Vec<bool> = self.vals.iter().map(|&f| f >= c).collect();
        let at = |i: usize, j: usize| inside[i * self.nv + j];
        let mut segments: Vec<[u64; 2]> = Vec::new();

        let quad_rows = if self.u_wrap { self.nu } else { self.nu - 1 };
        let quad_cols = if self.v_wrap { self.nv } else { self.nv - 1 };
        for i in 0..quad_rows {
            let i1 = self.next_i(i);
            for j in 0..quad_cols {
                let j1 = self.next_j(j);
                let corners = [at(i, j), at(i1, j), at(i1, j1), at(i, j1)];
                let edges = [self.h_edge(i, j), self.v_edge(i1, j), self.h_edge(i, j1), self.v_edge(i, j)];
                let crossing: Vec<usize> = (0..4).filter(|&e| corners[e] != corners[(e + 1) % 4]).collect();
                match crossing.len() {
                    2 => segments.push([edges[crossing[0]], edges[crossing[1]]]),
                    4 => {
                        let center = ChartPoint::new(0.5 * (self.u[i] + self.u_after(i)), 0.5 * (self.v[j] + self.v_after(j)));
                        let center_inside = self.expr.eval(center)? >= c;
                        // Cut off each corner whose state differs from the center.
                        for k in 0..4 {
                            if corners[k] != center_inside {
                                segments.push([edges[(k + 3) % 4], edges[k]]);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        for (k, pole) in self.poles.iter().enumerate() {
            let Some(pole) = pole else { continue };
            let apex = pole.f >= c;
            let row = pole.row;
            for j in 0..self.nv {
                let j1 = self.next_j(j);
                let (a, b) = (at(row, j), at(row, j1));
                let mut cut = Vec::with_capacity(2);
                if apex != a {
                    cut.push(self.spoke(k, j));
                }
                if a != b {
                    cut.push(self.v_edge(row, j));
                }
                if apex != b {
                    cut.push(self.spoke(k, j1));
                }
                if cut.len() == 2 {
                    segments.push([cut[0], cut[1]]);
                }
            }
        }
        let model = self.expr.model();
        stitch(&segments)
            .into_iter()
            .map(|(ids, closed)| {
                let points = ids.iter().map(|&id| self.crossing(id, c, model)).collect::<Result<Vec<_>>>()?;
                Ok(Contour { points, closed })
            })
            .collect()
    }
}

/// Joins segments sharing an edge id into chains. Returns edge-id sequences
/// with a closed flag; closed chains repeat their first id at the end.
fn stitch(segments: &[[u64; 2]]) -> Vec<(Vec<u64>, bool)> {
    let mut at_edge: HashMap<u64, [usize; 2]> = HashMap::with_capacity(2 * segments.len());
    for (s, seg) in segments.iter().enumerate() {
        for &e in seg {
            let slot = at_edge.entry(e).or_insert([usize::MAX; 2]);
            if slot[0] == usize::MAX {
                slot[0] = s;
            } else {
                slot[1] = s;
            }
        }
    }
    let degree = |e: u64| at_edge[&e].iter().filter(|&&s| s != usize::MAX).count();
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();

    let walk = |start_seg: usize, start_edge: u64, used: &mut Vec<bool>| -> (Vec<u64>, bool) {
        let mut ids = vec![start_edge];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let [a, b] = segments[seg];
            let next = if a == edge { b } else { a };
            ids.push(next);
            if next == start_edge {
                return (ids, true);
            }
            match at_edge[&next].iter().find(|&&s| s != usize::MAX && !used[s]) {
                Some(&s) => {
                    seg = s;
                    edge = next;
                }
                None => return (ids, false),
            }
        }
    };

    // Open chains start at an edge owned by a single segment.
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        if let Some(&e) = segments[s].iter().find(|&&e| degree(e) == 1) {
            chains.push(walk(s, e, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            chains.push(walk(s, segments[s][0], &mut used));
        }
    }
    chains
}
