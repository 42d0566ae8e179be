//! Derivative-free local optimizers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of a local minimization.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub history: Vec<f64>,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut history = Vec::new();
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
        history.push(fc.min(fd));
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum {
        x: vec![x],
        value,
        iterations,
        converged: b - a <= tol,
        history,
    }
}

/// Nelder–Mead simplex search started at `x0` with initial edge lengths
/// `step`. Converges when every vertex lies within `xtol[i]` of the best
/// vertex in coordinate `i`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    xtol: &[f64],
    max_iter: usize,
) -> Minimum {
    let n = x0.len();
    assert!(step.len() == n && xtol.len() == n);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread_ok = simplex[1..].iter().all(|v| {
            v.iter()
                .zip(&simplex[0])
                .zip(xtol)
                .all(|((a, b), t)| (a - b).abs() <= *t)
        });
        if spread_ok {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|v| v[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = along(-0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = along(0.5);
                let v = f(&c);
                (c, v)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for j in 1..=n {
                    for i in 0..n {
                        simplex[j][i] = best[i] + 0.5 * (simplex[j][i] - best[i]);
                    }
                    values[j] = f(&simplex[j]);
                }
            }
        }
        history.push(values.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    Minimum {
        x: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
        history,
    }
}
