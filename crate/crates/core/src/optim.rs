//! Minimal Nelder-Mead simplex minimizer for the smooth, cheap objectives
//! in the Bell maximization (dimension <= 8).

pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Simplex diameter fell below the tolerance within the iteration cap.
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with an axis-aligned initial simplex of
/// the given step. Standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, 1/2, 1/2).
pub(crate) fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    diameter_tol: f64,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if diameter(&simplex, best) < diameter_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; dim];
        for &idx in &order[..dim] {
            for d in 0..dim {
                centroid[d] += simplex[idx][d];
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let reflected: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + (centroid[d] - simplex[worst][d]))
            .collect();
        let f_r = f(&reflected);

        if f_r < values[best] {
            let expanded: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + 2.0 * (reflected[d] - centroid[d]))
                .collect();
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }

        let contracted: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]))
            .collect();
        let f_c = f(&contracted);
        if f_c < values[worst] {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }

        // shrink toward the best vertex
        let best_point = simplex[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            for d in 0..dim {
                simplex[idx][d] = best_point[d] + 0.5 * (simplex[idx][d] - best_point[d]);
            }
            values[idx] = f(&simplex[idx]);
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    SimplexOutcome { x: simplex[best].clone(), value: values[best], converged }
}

fn diameter(simplex: &[Vec<f64>], best: usize) -> f64 {
    let mut d = 0.0f64;
    for v in simplex {
        let dist: f64 = v
            .iter()
            .zip(&simplex[best])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        d = d.max(dist);
    }
    d
}
