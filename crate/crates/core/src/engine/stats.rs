/// Two-sided 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes` out of `n` trials, clamped so
/// that `0 <= low <= p_hat <= high <= 1`.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    assert!(n > 0, "Wilson interval needs at least one trial");
    let nf = n as f64;
    let p_hat = successes as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let centre = p_hat + z2 / (2.0 * nf);
    let spread = Z_95 * (p_hat * (1.0 - p_hat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = ((centre - spread) / denom).clamp(0.0, p_hat);
    let high = ((centre + spread) / denom).clamp(p_hat, 1.0);
    (low, high)
}
