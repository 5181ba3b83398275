//! Scale conditions of the block construction for a few bases C_0.

use rwdre::renorm::{check_constants, RenormParams};

fn main() -> rwdre::Result<()> {
    for c0 in [2u64, 16, 256] {
        let params = RenormParams::new(c0, 2e-4, 1, 16.0)?;
        let rep = check_constants(&params, 1.0, 4, (2, 4096));
        println!(
            "C0 = {c0}: gamma products base 2 {:.4} ({}), base C0 {:.4} ({})",
            rep.gamma_bound_base2, rep.gamma_ok_base2, rep.gamma_bound_c0, rep.gamma_ok_c0
        );
        for row in &rep.rows {
            println!("  r = {}: scale {}, density {}", row.r, row.const3_ok, row.const4_ok);
        }
    }
    Ok(())
}
