mod support;

use support::oracle;

#[test]
fn short_time_expansion() {
    // y ≈ y₀ + y₀² t^{1+α} / (α(1+α)) while y stays near y₀
    let (y0, gamma, t) = (0.1, 0.5, 1e-2);
    let alpha = 1.0 - gamma;
    let y = oracle::value_at(y0, gamma, t, 1e-4);
    let lead = y0 * y0 * t.powf(1.0 + alpha) / (alpha * (1.0 + alpha));
    assert!(((y - y0) / lead - 1.0).abs() < 1e-3, "{}", (y - y0) / lead);
}

#[test]
fn second_order_self_convergence() {
    let at = |h: f64| *oracle::solve(0.5, 0.5, 1.0, h, f64::INFINITY, f64::INFINITY).values.last().unwrap();
    let (a, b, c) = (at(4e-3), at(2e-3), at(1e-3));
    let order = ((a - b) / (b - c)).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
}

#[test]
fn zero_data_stays_zero_and_large_data_blows_up() {
    assert_eq!(oracle::value_at(0.0, 0.5, 1.0, 1e-2), 0.0);
    let t1 = oracle::blowup_time(1.0, 0.5, 1e-3, 1e-2, 1e8).unwrap();
    let t2 = oracle::blowup_time(2.0, 0.5, 1e-3, 1e-2, 1e8).unwrap();
    assert!(t2 < t1);
}
