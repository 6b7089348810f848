//! Square assignment problems on dense `f64` cost matrices.

use std::collections::VecDeque;

/// Perfect matching in the bipartite graph `adj[left] = rights`, or `None`.
pub fn hopcroft_karp(n: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    const FREE: usize = usize::MAX;
    let mut left_to = vec![FREE; n];
    let mut right_to = vec![FREE; n];
    let mut dist = vec![0usize; n];
    let mut matched = 0;
    loop {
        let mut queue = VecDeque::new();
        for u in 0..n {
            if left_to[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = right_to[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..n {
            if left_to[u] == FREE && augment(u, adj, &mut left_to, &mut right_to, &mut dist) {
                matched += 1;
            }
        }
    }
    (matched == n).then_some(left_to)
}

fn augment(u: usize, adj: &[Vec<usize>], left_to: &mut [usize], right_to: &mut [usize], dist: &mut [usize]) -> bool {
    for &v in &adj[u] {
        let w = right_to[v];
        if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, left_to, right_to, dist)) {
            left_to[u] = v;
            right_to[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Smallest `t` such that a perfect matching uses only entries `≤ t`,
/// together with one such matching (`sigma[row] = col`).
pub fn bottleneck(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let mut levels: Vec<f64> = cost.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |t: f64| {
        let adj: Vec<Vec<usize>> = cost.iter().map(|r| (0..n).filter(|&k| r[k] <= t).collect()).collect();
        hopcroft_karp(n, &adj)
    };
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let sigma = feasible(levels[lo]).expect("complete bipartite graph has a perfect matching");
    (levels[lo], sigma)
}

/// Minimum-sum assignment (shortest augmenting paths with potentials).
/// Entries may be `+∞` provided some finite perfect matching exists.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[col] = row matched to col, 1-based with 0 as the virtual row
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut sigma = vec![0; n];
    for j in 1..=n {
        sigma[p[j] - 1] = j - 1;
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn matches_brute_force() {
        let mut seed = 3;
        for n in 1..=6 {
            for _ in 0..20 {
                let c: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| (lcg(&mut seed) * 10.0).floor()).collect()).collect();
                let all = permutations(n);
                let best_max = all.iter().map(|p| (0..n).map(|i| c[i][p[i]]).fold(0.0, f64::max)).fold(f64::INFINITY, f64::min);
                let best_sum = all.iter().map(|p| (0..n).map(|i| c[i][p[i]]).sum::<f64>()).fold(f64::INFINITY, f64::min);
                let (t, sigma) = bottleneck(&c);
                assert_eq!(t, best_max);
                assert!((0..n).all(|i| c[i][sigma[i]] <= t));
                let h = hungarian(&c);
                assert_eq!((0..n).map(|i| c[i][h[i]]).sum::<f64>(), best_sum);
            }
        }
    }

    #[test]
    fn hungarian_avoids_infinite_entries() {
        let inf = f64::INFINITY;
        let c = vec![vec![inf, 1.0, inf], vec![2.0, inf, inf], vec![inf, inf, 0.0]];
        assert_eq!(hungarian(&c), vec![1, 0, 2]);
    }

    #[test]
    fn no_perfect_matching() {
        assert!(hopcroft_karp(2, &[vec![0], vec![0]]).is_none());
    }
}
