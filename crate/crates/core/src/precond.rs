//! Fast solver for `(shift - Lap_5) z = g` with homogeneous Dirichlet data,
//! diagonalized by a sine transform along each axis.

use std::sync::Arc;

use rayon::prelude::*;
use rustdct::{Dst1, DctPlanner};

pub(crate) struct ShiftedLaplacian {
    nx: usize,
    ny: usize,
    shift: f64,
    eig_x: Vec<f64>,
    eig_y: Vec<f64>,
    dst_x: Arc<dyn Dst1<f64>>,
    dst_y: Arc<dyn Dst1<f64>>,
}

impl ShiftedLaplacian {
    /// `nx`, `ny` count all nodes including the Dirichlet ring.
    pub(crate) fn new(nx: usize, ny: usize, shift: f64) -> Self {
        let (mx, my) = (nx - 2, ny - 2);
        let mut planner = DctPlanner::new();
        let eig = |m: usize| -> Vec<f64> {
            (0..m)
                .map(|k| {
                    let s = (std::f64::consts::PI * (k + 1) as f64 / (2.0 * (m + 1) as f64)).sin();
                    4.0 * s * s
                })
                .collect()
        };
        Self {
            nx,
            ny,
            shift,
            eig_x: eig(mx),
            eig_y: eig(my),
            dst_x: planner.plan_dst1(mx),
            dst_y: planner.plan_dst1(my),
        }
    }

    fn transform_rows(dst: &Arc<dyn Dst1<f64>>, data: &mut [f64], len: usize) {
        data.par_chunks_mut(len).for_each_init(
            || vec![0.0; dst.get_scratch_len()],
            |scratch, row| {
                // some rustdct plans read stale scratch contents
                scratch.fill(0.0);
                dst.process_dst1_with_scratch(row, scratch)
            },
        );
    }

    fn transpose(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
        let mut out = vec![0.0; src.len()];
        const B: usize = 32;
        for rb in (0..rows).step_by(B) {
            for cb in (0..cols).step_by(B) {
                for r in rb..(rb + B).min(rows) {
                    for c in cb..(cb + B).min(cols) {
                        out[c * rows + r] = src[r * cols + c];
                    }
                }
            }
        }
        out
    }

    /// Writes the solution into `out` (boundary ring set to zero); only
    /// interior values of `g` are read.
    pub(crate) fn solve(&self, g: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let (mx, my) = (nx - 2, ny - 2);
        let mut work = vec![0.0; mx * my];
        for j in 0..my {
            let src = (j + 1) * nx + 1;
            work[j * mx..(j + 1) * mx].copy_from_slice(&g[src..src + mx]);
        }
        Self::transform_rows(&self.dst_x, &mut work, mx);
        let mut t = Self::transpose(&work, my, mx);
        Self::transform_rows(&self.dst_y, &mut t, my);
        // unnormalized DST-I applied twice scales by (m+1)/2 per axis
        let norm = 4.0 / ((mx + 1) as f64 * (my + 1) as f64);
        t.par_chunks_mut(my).enumerate().for_each(|(i, col)| {
            let ex = self.eig_x[i] + self.shift;
            for (j, v) in col.iter_mut().enumerate() {
                *v *= norm / (ex + self.eig_y[j]);
            }
        });
        Self::transform_rows(&self.dst_y, &mut t, my);
        let mut work = Self::transpose(&t, mx, my);
        Self::transform_rows(&self.dst_x, &mut work, mx);
        out.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..my {
            let dst = (j + 1) * nx + 1;
            out[dst..dst + mx].copy_from_slice(&work[j * mx..(j + 1) * mx]);
        }
    }
}
