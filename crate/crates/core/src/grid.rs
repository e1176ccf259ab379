use std::collections::HashMap;

use crate::geometry::Point2;

/// Uniform bucket grid for fixed-radius neighbor queries.
///
/// Queries scan a `(2 * reach + 1)^2` block of cells; callers filter the
/// returned candidates by exact distance.
pub(crate) struct BucketGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl BucketGrid {
    pub(crate) fn new(cell: f64) -> Self {
        BucketGrid {
            cell: if cell > 0.0 && cell.is_finite() { cell } else { 1.0 },
            buckets: HashMap::new(),
        }
    }

    pub(crate) fn with_points(cell: f64, points: &[Point2]) -> Self {
        let mut g = BucketGrid::new(cell);
        for (i, &p) in points.iter().enumerate() {
            g.insert(p, i);
        }
        g
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    pub(crate) fn insert(&mut self, p: Point2, id: usize) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(id);
    }

    /// Candidate ids within `reach` cells of `p` (in ascending cell order,
    /// insertion order within a cell).
    pub(crate) fn near(&self, p: Point2, reach: i64) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.key(p);
        (cx.saturating_sub(reach)..=cx.saturating_add(reach)).flat_map(move |ix| {
            (cy.saturating_sub(reach)..=cy.saturating_add(reach)).flat_map(move |iy| {
                self.buckets
                    .get(&(ix, iy))
                    .map(|v| v.as_slice())
                    .unwrap_or(&[])
                    .iter()
                    .copied()
            })
        })
    }
}
