//! Uniform bucket grid over the node coordinates.
//!
//! Nodes are binned into axis-aligned cubic cells stored in CSR layout, so a
//! fixed-radius query only touches the cells overlapping the query box.

/// Cells per node the grid is allowed to allocate.
const MAX_CELLS_PER_NODE: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct GridIndex {
    dim: usize,
    origin: Vec<f64>,
    cell: f64,
    shape: Vec<usize>,
    /// `cell_start[c]..cell_start[c + 1]` indexes into `entries`.
    cell_start: Vec<usize>,
    entries: Vec<usize>,
}

impl GridIndex {
    pub(crate) fn build(dim: usize, coords: &[f64]) -> Self {
        let n = coords.len() / dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in coords.chunks_exact(dim) {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0_f64, f64::max);

        // Aim for about one node per cell along the widest axis.
        let per_axis = (n as f64).powf(1.0 / dim as f64).ceil().max(1.0);
        let mut cell = if extent > 0.0 { extent / per_axis } else { 1.0 };
        let mut shape = Self::shape_for(dim, &lo, &hi, cell);
        let budget = MAX_CELLS_PER_NODE * n.max(1) + 1;
        while shape.iter().product::<usize>() > budget {
            cell *= 1.5;
            shape = Self::shape_for(dim, &lo, &hi, cell);
        }

        let ncells: usize = shape.iter().product();
        let mut counts = vec![0usize; ncells + 1];
        let mut owner = Vec::with_capacity(n);
        for p in coords.chunks_exact(dim) {
            let c = Self::flat(&shape, (0..dim).map(|k| Self::axis_cell(p[k], lo[k], cell, shape[k])));
            counts[c + 1] += 1;
            owner.push(c);
        }
        for c in 0..ncells {
            counts[c + 1] += counts[c];
        }
        let cell_start = counts.clone();
        let mut fill = counts;
        let mut entries = vec![0usize; n];
        // Ascending node order inside every cell.
        for (i, &c) in owner.iter().enumerate() {
            entries[fill[c]] = i;
            fill[c] += 1;
        }

        GridIndex {
            dim,
            origin: lo,
            cell,
            shape,
            cell_start,
            entries,
        }
    }

    fn shape_for(dim: usize, lo: &[f64], hi: &[f64], cell: f64) -> Vec<usize> {
        (0..dim)
            .map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).max(1))
            .collect()
    }

    fn axis_cell(x: f64, origin: f64, cell: f64, len: usize) -> usize {
        let c = ((x - origin) / cell).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(len - 1)
        }
    }

    fn flat(shape: &[usize], idx: impl Iterator<Item = usize>) -> usize {
        let mut flat = 0;
        let mut stride = 1;
        for (k, i) in idx.enumerate() {
            flat += i * stride;
            stride *= shape[k];
        }
        flat
    }

    fn cell_members(&self, flat: usize) -> &[usize] {
        &self.entries[self.cell_start[flat]..self.cell_start[flat + 1]]
    }

    /// Calls `visit(i, dist)` for every node with `dist < radius`.
    /// Visiting order is cell order, not index order.
    pub(crate) fn for_each_within(
        &self,
        coords: &[f64],
        center: &[f64],
        radius: f64,
        mut visit: impl FnMut(usize, f64),
    ) {
        let dim = self.dim;
        let mut lo = vec![0usize; dim];
        let mut hi = vec![0usize; dim];
        for k in 0..dim {
            let a = center[k] - radius - self.origin[k];
            let b = center[k] + radius - self.origin[k];
            let top = self.shape[k] as f64 * self.cell;
            // Query box misses the grid box entirely, except for the clamped
            // last cell which holds nodes sitting on the upper boundary.
            if b < 0.0 || a > top {
                return;
            }
            lo[k] = Self::axis_cell(center[k] - radius, self.origin[k], self.cell, self.shape[k]);
            hi[k] = Self::axis_cell(center[k] + radius, self.origin[k], self.cell, self.shape[k]);
        }
        let r2 = radius * radius;
        let mut cur = lo.clone();
        loop {
            let flat = Self::flat(&self.shape, cur.iter().copied());
            for &i in self.cell_members(flat) {
                let p = &coords[i * dim..(i + 1) * dim];
                let d2 = sq_dist(p, center);
                if d2 < r2 {
                    visit(i, d2.sqrt());
                }
            }
            // Odometer increment over the cell box.
            let mut k = 0;
            loop {
                if k == dim {
                    return;
                }
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
                k += 1;
            }
        }
    }

    /// Nearest node to `center` as `(index, distance)`; ties resolve to the
    /// smaller index.
    pub(crate) fn nearest(&self, coords: &[f64], center: &[f64]) -> Option<(usize, f64)> {
        if self.entries.is_empty() {
            return None;
        }
        let dim = self.dim;
        let home: Vec<isize> = (0..dim)
            .map(|k| Self::axis_cell(center[k], self.origin[k], self.cell, self.shape[k]) as isize)
            .collect();
        let max_ring = *self.shape.iter().max().unwrap() as isize;
        let mut best: Option<(usize, f64)> = None;

        for ring in 0..=max_ring {
            // Nodes in rings beyond `ring` are at least `ring * cell` away.
            if let Some((_, d2)) = best {
                let bound = (ring - 1).max(0) as f64 * self.cell;
                if ring > 0 && d2 <= bound * bound {
                    break;
                }
            }
            let lo: Vec<isize> = home.iter().map(|&h| h - ring).collect();
            let mut cur = lo.clone();
            loop {
                let on_shell = (0..dim).any(|k| (cur[k] - home[k]).abs() == ring);
                let inside = (0..dim).all(|k| cur[k] >= 0 && (cur[k] as usize) < self.shape[k]);
                if on_shell && inside {
                    let flat = Self::flat(&self.shape, cur.iter().map(|&c| c as usize));
                    for &i in self.cell_members(flat) {
                        let d2 = sq_dist(&coords[i * dim..(i + 1) * dim], center);
                        best = match best {
                            Some((bi, bd)) if bd < d2 || (bd == d2 && bi < i) => Some((bi, bd)),
                            _ => Some((i, d2)),
                        };
                    }
                }
                let mut k = 0;
                loop {
                    if k == dim {
                        break;
                    }
                    if cur[k] < home[k] + ring {
                        cur[k] += 1;
                        break;
                    }
                    cur[k] = lo[k];
                    k += 1;
                }
                if k == dim {
                    break;
                }
            }
        }
        best.map(|(i, d2)| (i, d2.sqrt()))
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
