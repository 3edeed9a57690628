//! Bounded scalar minimisation.

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
///
/// The endpoints are evaluated as well, so a minimum sitting on the boundary
/// is returned exactly. Ties go to the smaller abscissa.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };

    let f_lo = eval(lo);
    if hi - lo <= tol {
        return Minimum {
            x: lo,
            value: f_lo,
            evaluations: 1,
        };
    }
    let f_hi = eval(hi);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }

    let mut best = (lo, f_lo);
    for candidate in [(c, fc), (d, fd), (hi, f_hi)] {
        if candidate.1 < best.1 {
            best = candidate;
        }
    }
    Minimum {
        x: best.0,
        value: best.1,
        evaluations,
    }
}

/// Golden-section refinement after a uniform scan with `samples + 1` points.
///
/// The scan brackets the best sample so that plateaus (for example an
/// infinite objective outside some sub-interval) cannot mislead the search.
pub fn scan_then_golden<F>(mut f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    if hi - lo <= tol || samples < 2 {
        return golden_section(f, lo, hi, tol);
    }
    let step = (hi - lo) / samples as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=samples {
        let x = if i == samples { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let refined = golden_section(&mut f, a, b, tol);
    let best_x = if best_i == samples { hi } else { lo + step * best_i as f64 };
    if refined.value <= best_v {
        Minimum {
            evaluations: refined.evaluations + samples + 1,
            ..refined
        }
    } else {
        Minimum {
            x: best_x,
            value: best_v,
            evaluations: refined.evaluations + samples + 1,
        }
    }
}
