//! Nelder-Mead downhill simplex.

#[derive(Debug, Clone)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub f: f64,
    pub evals: usize,
}

/// Minimizes `f` from `start` with initial edge lengths `step`.
pub fn nelder_mead<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> f64,
    start: [f64; N],
    step: [f64; N],
    max_evals: usize,
    ftol: f64,
) -> SimplexResult<N> {
    let mut pts: Vec<[f64; N]> = vec![start; N + 1];
    for (i, p) in pts.iter_mut().skip(1).enumerate() {
        p[i] += step[i];
    }
    let mut vals: Vec<f64> = pts.iter().map(&mut f).collect();
    let mut evals = N + 1;

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i]).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = (vals[N] - vals[0]).abs();
        if spread <= ftol * (vals[0].abs() + vals[N].abs() + 1e-300) {
            break;
        }

        let mut centroid = [0.0; N];
        for p in &pts[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let along = |t: f64| {
            let mut out = [0.0; N];
            for k in 0..N {
                out[k] = centroid[k] + t * (pts[N][k] - centroid[k]);
            }
            out
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[N] = xe;
                vals[N] = fe;
            } else {
                pts[N] = xr;
                vals[N] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            pts[N] = xr;
            vals[N] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[N] {
            let xc = along(-0.5);
            (xc, f(&xc))
        } else {
            let xc = along(0.5);
            (xc, f(&xc))
        };
        evals += 1;
        if fc < vals[N].min(fr) {
            pts[N] = xc;
            vals[N] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        let best = pts[0];
        for i in 1..=N {
            for k in 0..N {
                pts[i][k] = best[k] + 0.5 * (pts[i][k] - best[k]);
            }
            vals[i] = f(&pts[i]);
        }
        evals += N;
    }

    let best = (0..=N).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    SimplexResult { x: pts[best], f: vals[best], evals }
}
