//! One-time Monte Carlo oracle fixing E(X) for the regular DGP.
//!
//! The covariate mean enters the outcome models through centering; the first
//! three coordinates have closed forms but X4 involves nested products, so
//! the constant baked into `ppp_core::sim::REGULAR_MEAN_X` was fixed by this
//! script at 10^7 draws (Monte Carlo error ~1e-3, far below outcome noise).
//!
//! Run with: cargo run --release --example mean_x_oracle

use ppp_core::sim::{gen_regular, DgpConfig, DgpKind, REGULAR_MEAN_X};

fn main() {
    let n = 10_000_000;
    let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, n, 20240731));
    println!("coordinate, monte_carlo_mean, hard_coded");
    for j in 0..4 {
        let mean = sim.observed.x.column(j).sum() / n as f64;
        println!("x{}, {:.6}, {:.6}", j + 1, mean, REGULAR_MEAN_X[j]);
    }
}
