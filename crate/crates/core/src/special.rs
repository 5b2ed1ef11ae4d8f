//! Factorials and log-factorials, stable for large n.

/// n! as f64, by direct multiplication. Valid for n <= 170 (overflow above).
pub fn factorial(n: u32) -> f64 {
    assert!(n <= 170, "factorial({n}) overflows f64");
    let mut acc = 1.0_f64;
    for k in 2..=n as u64 {
        acc *= k as f64;
    }
    acc
}

/// ln(n!). Direct product up to 170, lgamma beyond.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= 170 {
        factorial(n).ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}
