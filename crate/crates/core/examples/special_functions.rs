//! Incomplete beta, Student t and F tails.
//!
//! cargo run --example special_functions

use iteb::{f_sf, normal_sf, reg_inc_beta, student_t_sf};

fn main() -> iteb::Result<()> {
    println!("I_0.3(2, 5)        = {:.12}", reg_inc_beta(2.0, 5.0, 0.3)?);
    for nu in [1.0, 3.0, 10.0, 100.0] {
        println!("P(T_{nu:<3} > 2)      = {:.12}", student_t_sf(2.0, nu)?);
    }
    println!("P(Z > 2)           = {:.12}", normal_sf(2.0));
    // The square of a t variable is F(1, nu).
    println!("P(F(1, 3) > 4)     = {:.12}", f_sf(4.0, 1.0, 3.0)?);
    println!("2 P(T_3 > 2)       = {:.12}", 2.0 * student_t_sf(2.0, 3.0)?);
    Ok(())
}
