use zak_cazac::ambiguity::unbiasedness_stat;
use zak_cazac::cazac::{resolve_family, FamilyTag};
use zak_cazac::constellation::Constellation;
use zak_cazac::GridParams;

/// Data frames look like flat noise to a CAZAC waveform: the mean squared
/// cross-ambiguity is `1/MN` at every lag.
fn main() -> zak_cazac::Result<()> {
    let q = Constellation::qam4();
    for (m, n, trials) in [(3, 5, 20_000), (5, 7, 5_000), (31, 37, 300)] {
        let grid = GridParams::unit(m, n)?;
        let x = resolve_family(FamilyTag::ZadoffChu { u: 2 }, &grid)?.resolved.dd();
        let r = unbiasedness_stat(&x, &q, trials, 11)?;
        println!(
            "{m}x{n}: mean |A|^2 = {:.4e} +- {:.1e}, 1/MN = {:.4e}, z = {:+.2}, psi = {}",
            r.mean_sq_cross,
            r.std_error,
            r.target,
            r.z_score(),
            r.psi
        );
    }
    Ok(())
}
