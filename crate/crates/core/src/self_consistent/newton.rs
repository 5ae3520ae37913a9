use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Success threshold on the residual ∞-norm.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Relative forward-difference step.
    pub fd_step: f64,
    pub max_condition: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iterations: 100,
            max_halvings: 30,
            fd_step: 1e-7,
            max_condition: 1e14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Damped Newton iteration on `f(x) = 0`.
///
/// `f` returns an error for points outside its domain (for example edges out
/// of order); such trial steps are halved like steps that fail to reduce the
/// norm. The starting point itself must lie in the domain.
pub fn newton_solve<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x).map_err(|e| match e {
        Error::Precondition(m) => Error::Precondition(m),
        other => Error::Precondition(format!("start point rejected: {other}")),
    })?;
    if r.len() != n {
        return Err(Error::InvalidInput(format!(
            "system has {} residuals for {n} unknowns",
            r.len()
        )));
    }
    let mut norm = inf_norm(&r);
    for iteration in 0..opts.max_iterations {
        if norm < opts.tol {
            return Ok(NewtonReport {
                x,
                norm,
                iterations: iteration,
            });
        }
        let jac = jacobian(&f, &x, &r, opts.fd_step)?;
        let sv = jac.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= opts.max_condition) {
            return Err(Error::SingularJacobian { condition });
        }
        let rhs = -DVector::from_column_slice(&r);
        let Some(dx) = jac.lu().solve(&rhs) else {
            return Err(Error::SingularJacobian {
                condition: f64::INFINITY,
            });
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(xi, di)| xi + t * di).collect();
            if let Ok(rt) = f(&trial) {
                let nt = inf_norm(&rt);
                if nt < norm {
                    x = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                best: x,
                norm,
                iterations: iteration + 1,
            });
        }
    }
    if norm < opts.tol {
        return Ok(NewtonReport {
            x,
            norm,
            iterations: opts.max_iterations,
        });
    }
    Err(Error::NonConvergence {
        best: x,
        norm,
        iterations: opts.max_iterations,
    })
}

/// Forward differences, falling back to a backward step when the forward
/// point leaves the domain.
fn jacobian<F>(f: &F, x: &[f64], r: &[f64], step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(r.len(), n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let (rj, hj) = match f(&probe) {
            Ok(v) => (v, h),
            Err(_) => {
                probe[j] = x[j] - h;
                (f(&probe)?, -h)
            }
        };
        probe[j] = x[j];
        for i in 0..r.len() {
            jac[(i, j)] = (rj[i] - r[i]) / hj;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_system() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]]);
        let rep = newton_solve(f, &[1.0, 0.5], &NewtonOptions::default()).unwrap();
        let s = 2f64.sqrt();
        assert!((rep.x[0] - s).abs() < 1e-12 && (rep.x[1] - s).abs() < 1e-12);
        assert!(rep.norm < 1e-12);
    }

    #[test]
    fn reports_singular_jacobian() {
        let f = |x: &[f64]| Ok(vec![x[0] + x[1] - 1.0, 2.0 * x[0] + 2.0 * x[1] - 3.0]);
        assert!(matches!(
            newton_solve(f, &[0.0, 0.0], &NewtonOptions::default()),
            Err(Error::SingularJacobian { .. })
        ));
    }

    #[test]
    fn reports_non_convergence_with_best_iterate() {
        // no real root
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + 1.0]);
        match newton_solve(f, &[0.5], &NewtonOptions::default()) {
            Err(Error::NonConvergence { best, norm, .. }) => {
                assert_eq!(best.len(), 1);
                assert!(norm >= 1.0);
            }
            Err(Error::SingularJacobian { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_start_outside_domain() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                Err(Error::Precondition("negative".into()))
            } else {
                Ok(vec![x[0] - 1.0])
            }
        };
        assert!(matches!(
            newton_solve(f, &[-1.0], &NewtonOptions::default()),
            Err(Error::Precondition(_))
        ));
        assert!(newton_solve(f, &[3.0], &NewtonOptions::default()).is_ok());
    }
}
