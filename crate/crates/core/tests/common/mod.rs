//! Brute-force reference implementations used by the integration suites.
//! They work on plain vectors and share no code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `Σ p · log2(1/p)` over the positive entries.
pub fn entropy_oracle(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h += x * (1.0 / x).log2();
        }
    }
    h
}

/// Bin of `x` among `bins` equal-width intervals over `[lo, hi]`, found by
/// scanning the interval edges; the maximum belongs to the last bin.
pub fn bin_oracle(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi == lo {
        return 0;
    }
    for b in 0..bins {
        let upper_edge = (b + 1) as f64 / bins as f64;
        if (x - lo) / (hi - lo) < upper_edge {
            return b;
        }
    }
    bins - 1
}

/// Information gain by explicit joint histogram: every (bin, class) cell is
/// counted by a full scan of the samples.
pub fn ig_oracle(row: &[f64], classes: &[usize], n_classes: usize, bins: usize) -> f64 {
    let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let binned: Vec<usize> = row.iter().map(|&x| bin_oracle(x, lo, hi, bins)).collect();
    let m = row.len() as f64;
    let mut joint = Vec::new();
    let mut px = Vec::new();
    let mut py = vec![0.0; n_classes];
    for b in 0..bins {
        let mut in_bin = 0usize;
        for c in 0..n_classes {
            let mut count = 0usize;
            for j in 0..row.len() {
                if binned[j] == b && classes[j] == c {
                    count += 1;
                }
            }
            joint.push(count as f64 / m);
            py[c] += count as f64 / m;
            in_bin += count;
        }
        px.push(in_bin as f64 / m);
    }
    entropy_oracle(&px) + entropy_oracle(&py) - entropy_oracle(&joint)
}

/// Minimal SSE over every split of 1-D points into two non-empty groups.
pub fn min_sse_two_groups(points: &[f64]) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    // fix point 0 in group A to skip mirrored partitions
    for mask in 0u32..(1 << (n - 1)) {
        let mut a = vec![points[0]];
        let mut b = Vec::new();
        for (i, &p) in points.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                b.push(p);
            } else {
                a.push(p);
            }
        }
        if b.is_empty() {
            continue;
        }
        let sse = |g: &[f64]| {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
        };
        best = best.min(sse(&a) + sse(&b));
    }
    best
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn rows(a: ArrayView2<'_, f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Davies–Bouldin index by direct double loop over the definition.
pub fn db_oracle(
    data: ArrayView2<'_, f64>,
    labels: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> f64 {
    let x = rows(data);
    let z = rows(centroids);
    let k = z.len();
    let mut sigma = vec![0.0; k];
    for h in 0..k {
        let mut total = 0.0;
        let mut count = 0;
        for i in 0..x.len() {
            if labels[i] == h {
                total += dist(&x[i], &z[h]);
                count += 1;
            }
        }
        sigma[h] = total / count as f64;
    }
    let mut sum = 0.0;
    for h in 0..k {
        let mut worst = 0.0f64;
        for g in 0..k {
            if g != h {
                worst = worst.max((sigma[h] + sigma[g]) / dist(&z[h], &z[g]));
            }
        }
        sum += worst;
    }
    sum / k as f64
}

/// Crisp Xie–Beni index by direct double loop over the definition.
pub fn xb_oracle(
    data: ArrayView2<'_, f64>,
    labels: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> f64 {
    let x = rows(data);
    let z = rows(centroids);
    let mut num = 0.0;
    for h in 0..z.len() {
        for i in 0..x.len() {
            if labels[i] == h {
                num += sq_dist(&x[i], &z[h]);
            }
        }
    }
    let mut sep = f64::INFINITY;
    for h in 0..z.len() {
        for g in 0..z.len() {
            if g != h {
                sep = sep.min(sq_dist(&z[h], &z[g]));
            }
        }
    }
    num / (x.len() as f64 * sep)
}

/// Lower and upper sets produced by one literal FSRK run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedRun {
    pub lower: Vec<Vec<usize>>,
    pub upper: Vec<Vec<usize>>,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn fss_similarity(x: &[f64], z: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..x.len() {
        num += (x[j] - z[j]).abs();
        den += x[j] + z[j];
    }
    if den == 0.0 {
        1.0
    } else {
        1.0 - num / den
    }
}

fn average(points: &[&Vec<f64>]) -> Vec<f64> {
    let m = points[0].len();
    (0..m)
        .map(|j| points.iter().map(|p| p[j]).sum::<f64>() / points.len() as f64)
        .collect()
}

/// Literal FSRK loop on plain vectors: similarity of every gene to every
/// centroid, ratio test `S_h / S_max >= epsilon`, weighted centroid update,
/// stop when no centroid coordinate moves more than `tol`.
pub fn fsrk_script(
    genes: &[Vec<f64>],
    initial: &[Vec<f64>],
    epsilon: f64,
    w_lower: f64,
    w_upper: f64,
    tol: f64,
    max_iter: usize,
) -> ScriptedRun {
    let k = initial.len();
    let mut centroids = initial.to_vec();
    let mut lower = vec![Vec::new(); k];
    let mut upper = vec![Vec::new(); k];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        lower = vec![Vec::new(); k];
        upper = vec![Vec::new(); k];
        for (i, g) in genes.iter().enumerate() {
            let s: Vec<f64> = centroids.iter().map(|c| fss_similarity(g, c)).collect();
            let mut best = 0;
            for h in 1..k {
                if s[h] > s[best] {
                    best = h;
                }
            }
            let mut admitted = vec![best];
            if s[best] > 0.0 && s[best] < 1.0 && epsilon < 1.0 {
                for h in 0..k {
                    if h != best && s[h] / s[best] >= epsilon {
                        admitted.push(h);
                    }
                }
            }
            admitted.sort();
            if admitted.len() == 1 {
                lower[best].push(i);
            }
            for h in admitted {
                upper[h].push(i);
            }
        }
        let mut next = centroids.clone();
        for h in 0..k {
            let low: Vec<&Vec<f64>> = lower[h].iter().map(|&i| &genes[i]).collect();
            let bnd: Vec<&Vec<f64>> = upper[h]
                .iter()
                .filter(|i| !lower[h].contains(i))
                .map(|&i| &genes[i])
                .collect();
            next[h] = match (low.is_empty(), bnd.is_empty()) {
                (true, true) => centroids[h].clone(),
                (false, true) => average(&low),
                (true, false) => average(&bnd),
                (false, false) => {
                    let a = average(&low);
                    let b = average(&bnd);
                    a.iter()
                        .zip(&b)
                        .map(|(x, y)| w_lower * x + w_upper * y)
                        .collect()
                }
            };
        }
        let shift = centroids
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        centroids = next;
        if shift <= tol {
            break;
        }
    }
    ScriptedRun {
        lower,
        upper,
        centroids,
        iterations,
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |_| rng.random_range(lo..hi))
}

/// Same partition up to a relabelling of the clusters.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}
