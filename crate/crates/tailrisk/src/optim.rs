//! Derivative-free local minimizer (Nelder-Mead simplex) used by the
//! likelihood fit. Deterministic: no randomness in the initial simplex or
//! the update rules.

/// Outcome of a simplex search.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Convergence when the simplex f-spread falls below
    /// `tol_rel * (|f_best| + 1e-12)`.
    pub tol_rel: f64,
    /// Displacement used to build the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tol_rel: 1e-9,
            initial_step: 0.25,
        }
    }
}

impl NelderMead {
    pub fn minimize<F>(&self, f: F, x0: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = x0.len();
        assert!(n >= 1, "need at least one coordinate");

        // x0 plus one vertex displaced along each axis
        let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
        simplex.push((f(x0), x0.to_vec()));
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if v[i].abs() > 1.0 {
                self.initial_step * v[i].abs()
            } else {
                self.initial_step
            };
            simplex.push((f(&v), v));
        }
        sort_simplex(&mut simplex);

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iterations {
            iterations += 1;

            let spread = simplex[n].0 - simplex[0].0;
            if spread.abs() <= self.tol_rel * (simplex[0].0.abs() + 1e-12) {
                converged = true;
                break;
            }

            let centroid = centroid_excluding_worst(&simplex);
            let worst = simplex[n].1.clone();

            let reflected: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + alpha * (c - w))
                .collect();
            let f_reflected = f(&reflected);

            if f_reflected < simplex[0].0 {
                // try expanding further along the same direction
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&reflected)
                    .map(|(c, r)| c + gamma * (r - c))
                    .collect();
                let f_expanded = f(&expanded);
                if f_expanded < f_reflected {
                    simplex[n] = (f_expanded, expanded);
                } else {
                    simplex[n] = (f_reflected, reflected);
                }
            } else if f_reflected < simplex[n - 1].0 {
                simplex[n] = (f_reflected, reflected);
            } else {
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + rho * (w - c))
                    .collect();
                let f_contracted = f(&contracted);
                if f_contracted < simplex[n].0 {
                    simplex[n] = (f_contracted, contracted);
                } else {
                    // shrink toward the best vertex
                    let best = simplex[0].1.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let v: Vec<f64> = best
                            .iter()
                            .zip(&entry.1)
                            .map(|(b, x)| b + sigma * (x - b))
                            .collect();
                        *entry = (f(&v), v);
                    }
                }
            }
            sort_simplex(&mut simplex);
        }

        let (value, x) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            converged,
        }
    }
}

fn sort_simplex(simplex: &mut [(f64, Vec<f64>)]) {
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
}

fn centroid_excluding_worst(simplex: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let n = simplex.len() - 1;
    let dim = simplex[0].1.len();
    let mut c = vec![0.0; dim];
    for (_, v) in &simplex[..n] {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi;
        }
    }
    for ci in &mut c {
        *ci /= n as f64;
    }
    c
}
