//! Tail of the null statistic `xbar^2 / (tau2 + s2)` against a Monte-Carlo
//! estimate, with the normal and t bounds on either side.
//!
//! cargo run --release --example null_tail

use iteb::{normal_sf, null_quantile, null_sf, null_sf_mc_oracle, student_t_sf, NullTailParams};

fn main() -> iteb::Result<()> {
    let (sigma2, tau2, df) = (0.5, 1.0, 4.0);
    let params = NullTailParams::new(sigma2, tau2, df)?;
    println!("effective df {:.3}", params.effective_df());
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "t", "normal", "approx", "mc", "t_df");
    for t in [0.5, 1.0, 4.0, 9.0] {
        let mc = null_sf_mc_oracle(t, sigma2, tau2, df, 200_000, 7)?;
        println!(
            "{t:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            2.0 * normal_sf(t.sqrt()),
            null_sf(t, &params)?,
            mc.estimate,
            2.0 * student_t_sf(t.sqrt(), df)?
        );
    }
    println!("0.01 critical value {:.4}", null_quantile(0.01, &params)?);
    Ok(())
}
