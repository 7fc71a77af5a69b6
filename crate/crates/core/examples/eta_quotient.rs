//! The three descriptions of the triangular generating function agree.

use superden::exactq::{
    eta_quotient_theta, theta_triangle, triangle_product_form, triangle_series,
};

fn main() {
    let n = 16 * 12;
    let sum = triangle_series(n);
    let prod = triangle_product_form(n);
    println!("△(q)         = {sum}");
    println!(
        "product form agrees: {}",
        sum.first_mismatch(&prod).is_none()
    );

    let theta = theta_triangle(n);
    let eta = eta_quotient_theta(n);
    println!("θ_△          = {theta}");
    println!(
        "η(2τ)²/η(τ)  agrees: {}",
        theta.first_mismatch(&eta).is_none()
    );
}
