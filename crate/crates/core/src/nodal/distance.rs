//! Chamfer distance to the nearest foreign cell, measured in the surface
//! metric.
//!
//! Distances live on cell representatives. A cell touching a cell with a
//! different label starts at the interpolated zero crossing along the link
//! (midway when the two values share a sign), and a cell on the chart
//! boundary at its distance to the boundary. Forward and
//! backward raster passes over the 8-neighborhood then propagate distances;
//! passes repeat until stable because periodic axes and polar nodes carry
//! information against the raster direction.

use std::f64::consts::TAU;

use crate::grid::{GridField, PoleEnd};
use crate::surfaces::SurfaceModel;

pub(crate) const NO_LABEL: u32 = u32::MAX;

struct Geometry {
    nu: usize,
    nv: usize,
    u_periodic: bool,
    v_periodic: bool,
    /// Link length from row `i` to row `i + 1` along `u` (wrapped on the last
    /// row when periodic).
    du: Vec<f64>,
    /// `v` link length on row `i`.
    dv_row: Vec<f64>,
    /// `v` link length midway between rows `i` and `i + 1`.
    dv_half: Vec<f64>,
    /// Distance from row 0 / last row to the low / high edge of the chart.
    edge_lo: f64,
    edge_hi: f64,
    /// Distance from the first / last column to the `v` chart edges.
    vedge_lo: f64,
    vedge_hi: f64,
    pole_lo: Option<(usize, f64)>,
    pole_hi: Option<(usize, f64)>,
}

impl Geometry {
    fn new(gf: &GridField) -> Self {
        let model = gf.model();
        let (au, av) = model.axes();
        let res = gf.resolution();
        let (nu, nv) = (res.nu, res.nv);
        let u = gf.u_coords();
        let v = gf.v_coords();
        let v_step = if av.periodic { TAU / nv as f64 } else { av.len() / nv as f64 };
        let scale = |uu: f64| match model {
            SurfaceModel::RoundSphere => uu.sin(),
            SurfaceModel::UnitDisc => uu,
            _ => 1.0,
        };
        let du: Vec<f64> = (0..nu)
            .map(|i| if i + 1 < nu { u[i + 1] - u[i] } else if au.periodic { au.len() - u[i] + u[0] } else { f64::INFINITY })
            .collect();
        let dv_row = (0..nu).map(|i| v_step * scale(u[i])).collect();
        let dv_half = (0..nu)
            .map(|i| if i + 1 < nu { v_step * scale(0.5 * (u[i] + u[i + 1])) } else { v_step * scale(u[i]) })
            .collect();
        let base = nu * nv;
        let pole = |end| gf.pole(end).map(|(k, _)| base + k);
        let pole_lo = pole(PoleEnd::Low).map(|id| (id, u[0] - au.lo));
        let pole_hi = pole(PoleEnd::High).map(|id| (id, au.hi - u[nu - 1]));
        Self {
            nu,
            nv,
            u_periodic: au.periodic,
            v_periodic: av.periodic,
            du,
            dv_row,
            dv_half,
            edge_lo: if au.periodic || pole_lo.is_some() { f64::INFINITY } else { u[0] - au.lo },
            edge_hi: if au.periodic || pole_hi.is_some() { f64::INFINITY } else { au.hi - u[nu - 1] },
            vedge_lo: if av.periodic { f64::INFINITY } else { v[0] - av.lo },
            vedge_hi: if av.periodic { f64::INFINITY } else { av.hi - v[nv - 1] },
            pole_lo,
            pole_hi,
        }
    }

    fn row_step(&self, i: usize, di: isize) -> Option<usize> {
        let n = self.nu as isize;
        let k = i as isize + di;
        if (0..n).contains(&k) {
            Some(k as usize)
        } else if self.u_periodic {
            Some(k.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    fn col_step(&self, j: usize, dj: isize) -> Option<usize> {
        let n = self.nv as isize;
        let k = j as isize + dj;
        if (0..n).contains(&k) {
            Some(k as usize)
        } else if self.v_periodic {
            Some(k.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    /// Link from `(i, j)` to `(i + di, j + dj)` with its length.
    fn link(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<(usize, f64)> {
        let ii = self.row_step(i, di)?;
        let jj = self.col_step(j, dj)?;
        let du = match di {
            0 => 0.0,
            1 => self.du[i],
            _ => self.du[ii],
        };
        let dv = match (di, dj) {
            (_, 0) => 0.0,
            (0, _) => self.dv_row[i],
            (1, _) => self.dv_half[i],
            _ => self.dv_half[ii],
        };
        Some((ii * self.nv + jj, du.hypot(dv)))
    }
}

const FORWARD: [(isize, isize); 4] = [(-1, -1), (-1, 0), (-1, 1), (0, -1)];
const BACKWARD: [(isize, isize); 4] = [(1, 1), (1, 0), (1, -1), (0, 1)];
const CROSS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Distance from every labelled cell to the nearest cell with a different
/// label (unlabelled cells count as foreign). Unlabelled cells get `NaN`.
///
/// `labels` is indexed by unified cell id: regular nodes first, then polar
/// nodes in `gf.polar()` order.
pub(crate) fn distance_to_foreign(gf: &GridField, labels: &[u32]) -> Vec<f64> {
    let g = Geometry::new(gf);
    let (nu, nv) = (g.nu, g.nv);
    let mut d = vec![f64::INFINITY; labels.len()];
    let n_nodes = gf.nodes().len();
    let value = |id: usize| if id < n_nodes { gf.nodes()[id].f } else { gf.polar()[id - n_nodes].f };
    // Fraction of the link from `a` to the boundary shared with `b`;
    // unlabelled cells are zeros of the field.
    let cut = |a: usize, b: usize| {
        let fa = value(a);
        let fb = if labels[b] == NO_LABEL { 0.0 } else { value(b) };
        if fa * fb > 0.0 {
            0.5
        } else {
            fa.abs() / (fa.abs() + fb.abs())
        }
    };

    for i in 0..nu {
        for j in 0..nv {
            let id = i * nv + j;
            let lab = labels[id];
            if lab == NO_LABEL {
                continue;
            }
            let mut best = f64::INFINITY;
            for &(di, dj) in &CROSS {
                if let Some((nb, len)) = g.link(i, j, di, dj) {
                    if labels[nb] != lab {
                        best = best.min(cut(id, nb) * len);
                    }
                }
            }
            if i == 0 {
                best = best.min(g.edge_lo);
            }
            if i + 1 == nu {
                best = best.min(g.edge_hi);
            }
            if j == 0 {
                best = best.min(g.vedge_lo);
            }
            if j + 1 == nv {
                best = best.min(g.vedge_hi);
            }
            d[id] = best;
        }
    }
    let poles: Vec<(usize, usize, f64)> = [g.pole_lo.map(|(id, l)| (id, 0, l)), g.pole_hi.map(|(id, l)| (id, nu - 1, l))]
        .into_iter()
        .flatten()
        .collect();
    for &(pid, row, len) in &poles {
        if labels[pid] == NO_LABEL {
            continue;
        }
        for j in 0..nv {
            let id = row * nv + j;
            if labels[id] != labels[pid] {
                d[pid] = d[pid].min(cut(pid, id) * len);
                if labels[id] != NO_LABEL {
                    d[id] = d[id].min(cut(id, pid) * len);
                }
            }
        }
    }

    let relax = |d: &mut [f64], i: usize, j: usize, dirs: &[(isize, isize)]| -> bool {
        let id = i * nv + j;
        let lab = labels[id];
        if lab == NO_LABEL {
            return false;
        }
        let mut best = d[id];
        for &(di, dj) in dirs {
            if let Some((nb, len)) = g.link(i, j, di, dj) {
                if labels[nb] == lab {
                    best = best.min(d[nb] + len);
                }
            }
        }
        if best < d[id] {
            d[id] = best;
            true
        } else {
            false
        }
    };

    for _ in 0..10_000 {
        let mut changed = false;
        for i in 0..nu {
            for j in 0..nv {
                changed |= relax(&mut d, i, j, &FORWARD);
            }
        }
        for i in (0..nu).rev() {
            for j in (0..nv).rev() {
                changed |= relax(&mut d, i, j, &BACKWARD);
            }
        }
        for &(pid, row, len) in &poles {
            let lab = labels[pid];
            if lab == NO_LABEL {
                continue;
            }
            for j in 0..nv {
                let id = row * nv + j;
                if labels[id] == lab && d[id] + len < d[pid] {
                    d[pid] = d[id] + len;
                    changed = true;
                }
            }
            for j in 0..nv {
                let id = row * nv + j;
                if labels[id] == lab && d[pid] + len < d[id] {
                    d[id] = d[pid] + len;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (x, &lab) in d.iter_mut().zip(labels) {
        if lab == NO_LABEL {
            *x = f64::NAN;
        }
    }
    d
}
