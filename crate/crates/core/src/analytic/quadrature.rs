//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` and bisecting the worst panel until the summed error
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("quadrature breakpoints must be strictly increasing"));
    }
    let mut heap: BinaryHeap<Panel> = points.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                abs_error: error,
                panels: heap.len(),
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::Convergence {
                context: "adaptive quadrature".into(),
                detail: format!("error {error:e} after {} panels", heap.len()),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence {
                context: "adaptive quadrature".into(),
                detail: format!("panel [{}, {}] cannot be bisected", worst.a, worst.b),
            });
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(6) - 3.0 * x, &[0.0, 2.0], 1e-14, 0.0, 10).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
        assert_eq!(q.panels, 1);
    }

    #[test]
    fn oscillatory() {
        let q = integrate(|x| (50.0 * x).cos(), &[0.0, PI / 3.0], 1e-12, 0.0, 1000).unwrap();
        assert!((q.value - (50.0 * PI / 3.0).sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_endpoint() {
        let q = integrate(f64::sqrt, &[0.0, 1.0], 1e-10, 0.0, 1000).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate(|x| x, &[1.0, 1.0], 1e-10, 0.0, 10).is_err());
        assert!(integrate(|x| x, &[0.0], 1e-10, 0.0, 10).is_err());
    }

    #[test]
    fn panel_budget_is_enforced() {
        let r = integrate(|x| (1.0 / x).sin(), &[1e-6, 1.0], 1e-15, 0.0, 8);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }
}
