//! Lloyd's k-means with random-point seeding.

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Iteration cap for Lloyd refinement.
pub const MAX_LLOYD_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centers: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub sse_history: Vec<f64>,
}

impl KMeansResult {
    pub fn sse(&self) -> f64 {
        *self.sse_history.last().unwrap()
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = squared_distance(point, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn within_sse(points: &[Vec<f64>], centers: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &c)| squared_distance(p, &centers[c]))
        .sum()
}

/// Clusters `points` into `k` groups.
///
/// Centers start at `k` distinct randomly chosen points. Each round assigns
/// every point to its nearest center and then moves centers to their means;
/// a center left without points is moved onto the point farthest from its
/// own center. Stops once assignments no longer change or after
/// [`MAX_LLOYD_ITERATIONS`] rounds.
pub fn kmeans(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Result<KMeansResult> {
    let n = points.len();
    if k < 2 || k > n {
        return Err(Error::Parameter(format!("k must be in [2, {n}], got {k}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidInput("points have differing dimensions".into()));
    }

    let mut centers: Vec<Vec<f64>> = sample(rng, n, k).into_iter().map(|i| points[i].clone()).collect();
    let mut assignments: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    let mut sse_history = vec![within_sse(points, &centers, &assignments)];

    for _ in 0..MAX_LLOYD_ITERATIONS {
        update_centers(points, &mut centers, &mut assignments);
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
        let stable = next == assignments;
        assignments = next;
        sse_history.push(within_sse(points, &centers, &assignments));
        if stable {
            break;
        }
    }
    Ok(KMeansResult { centers, assignments, sse_history })
}

fn update_centers(points: &[Vec<f64>], centers: &mut [Vec<f64>], assignments: &mut [usize]) {
    let dim = points[0].len();
    let k = centers.len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignments.iter()) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(p) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        // reseed on the worst-fitting point among clusters that can spare one
        let far = points
            .iter()
            .enumerate()
            .filter(|(i, _)| counts[assignments[*i]] > 1)
            .map(|(i, p)| (i, squared_distance(p, &centers[assignments[i]])))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        if let Some((i, _)) = far {
            counts[assignments[i]] -= 1;
            let old = assignments[i];
            let remaining: Vec<&Vec<f64>> = points
                .iter()
                .zip(assignments.iter())
                .enumerate()
                .filter(|(j, (_, &a))| a == old && *j != i)
                .map(|(_, (p, _))| p)
                .collect();
            centers[old] = (0..dim)
                .map(|d| remaining.iter().map(|p| p[d]).sum::<f64>() / remaining.len() as f64)
                .collect();
            assignments[i] = c;
            counts[c] = 1;
            centers[c] = points[i].clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn k_equal_to_n_gives_zero_sse() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 1.0], vec![3.0, 4.0], vec![-2.0, 7.0]];
        let r = kmeans(&pts, 3, &mut substream(1, "t")).unwrap();
        assert_eq!(r.sse(), 0.0);
        let mut c = r.centers.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(c, vec![vec![-2.0, 7.0], vec![0.0, 1.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn k_out_of_range() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(kmeans(&pts, 1, &mut substream(1, "t")).is_err());
        assert!(kmeans(&pts, 3, &mut substream(1, "t")).is_err());
    }

    #[test]
    fn duplicate_points_trigger_reseeding() {
        // five identical points plus one outlier; any seeding ends with SSE 0
        let mut pts = vec![vec![1.0]; 5];
        pts.push(vec![9.0]);
        for seed in 0..20 {
            let r = kmeans(&pts, 2, &mut substream(seed, "t")).unwrap();
            assert_eq!(r.sse(), 0.0, "seed {seed}");
        }
    }
}
