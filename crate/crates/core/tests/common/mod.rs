#![allow(dead_code)]

use fhsmdp_core::model::FhSmdp;

/// Value of every state at stage 1 under the deterministic policy encoded
/// by `choice[(h - 1) * S + s]`, by plain recursion over the kernel.
pub fn evaluate_choice(smdp: &FhSmdp, choice: &[usize]) -> Option<Vec<f64>> {
    let (ns, horizon) = (smdp.num_states(), smdp.horizon());
    let mut v = vec![vec![0.0; ns]; horizon + 1];
    for h in (1..horizon).rev() {
        for s in 0..ns {
            let cell = smdp.cell(s, choice[(h - 1) * ns + s], h)?;
            let mut total = cell.reward;
            for &(w, p) in &cell.kernel {
                total += p * v[w.stage][w.state];
            }
            v[h][s] = total;
        }
    }
    Some(v[1].clone())
}

/// Best stage-1 value of every state over all deterministic Markov
/// policies, by exhaustive enumeration.
pub fn enumerate_optimum(smdp: &FhSmdp) -> Vec<f64> {
    let ns = smdp.num_states();
    let no = smdp.num_options();
    let slots = ns * (smdp.horizon() - 1);
    let mut best = vec![f64::NEG_INFINITY; ns];
    let mut choice = vec![0usize; slots];
    loop {
        if let Some(v) = evaluate_choice(smdp, &choice) {
            for s in 0..ns {
                best[s] = best[s].max(v[s]);
            }
        }
        let mut i = 0;
        loop {
            if i == slots {
                return best;
            }
            choice[i] += 1;
            if choice[i] < no {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `max q . v` over `{q >= 0, sum q = 1, |q - p|_1 <= beta}` as a linear
/// program with auxiliary variables `u >= |q - p|`.
pub fn lp_optimistic_value(p: &[f64], beta: f64, v: &[f64]) -> f64 {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let q: Vec<_> = v.iter().map(|&vi| lp.add_var(vi, (0.0, 1.0))).collect();
    let u: Vec<_> = p.iter().map(|_| lp.add_var(0.0, (0.0, 2.0))).collect();
    let mut sum = LinearExpr::empty();
    for &qi in &q {
        sum.add(qi, 1.0);
    }
    lp.add_constraint(sum, ComparisonOp::Eq, 1.0);
    let mut radius = LinearExpr::empty();
    for i in 0..p.len() {
        radius.add(u[i], 1.0);
        lp.add_constraint([(u[i], 1.0), (q[i], -1.0)], ComparisonOp::Ge, -p[i]);
        lp.add_constraint([(u[i], 1.0), (q[i], 1.0)], ComparisonOp::Ge, p[i]);
    }
    lp.add_constraint(radius, ComparisonOp::Le, beta);
    lp.solve().expect("LP is feasible").objective()
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    if lambda < 0.3 {
        return (d, 1.0);
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
    }
    (d, p.clamp(0.0, 1.0))
}

/// Round to `digits` significant figures.
pub fn sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}
