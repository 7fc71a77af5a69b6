//! Checks θ_△^{2m(2m+1)} = KW_m coefficient by coefficient.
//!
//!     cargo run --example identity -- 2 40

use superden::verify::{kw_series, truncation_for_terms, verify_identity};

fn main() {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let terms: i64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let n = truncation_for_terms(m, terms);

    let kw = kw_series(m, truncation_for_terms(m, 5)).unwrap();
    println!("KW_{m} = {kw}");

    let report = verify_identity(m, n).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
