use zak_cazac::ambiguity::dd_ambiguity;
use zak_cazac::pilot::{
    cazac_filter_2d, lattice_descriptor, point_pilot, spread_pilot, twisted_conv, Cazac2DParams, PilotSpec,
};
use zak_cazac::GridParams;

fn main() -> zak_cazac::Result<()> {
    for (m, n) in [(3, 5), (5, 7), (7, 11)] {
        let grid = GridParams::unit(m, n)?;
        let p = Cazac2DParams::new(grid, 1, 0, 1, 0, 0)?;
        let spec = PilotSpec::new(grid, 0, 0);
        let pilot = spread_pilot(&p, spec)?;

        // The fast lattice sum matches the full twisted convolution.
        let reference = twisted_conv(&cazac_filter_2d(&p), &point_pilot(spec))?.scaled(1.0 / (grid.mn() as f64).sqrt());
        let fast_err = pilot.sub(&reference)?.energy().sqrt();

        let lattice = lattice_descriptor(&p)?;
        let af = dd_ambiguity(&pilot, &pilot)?;
        let mut agree = true;
        let mut support = 0;
        for ((k, l), v) in af.iter() {
            let on = lattice.contains(k as i64, l as i64);
            agree &= on == (v.norm() > 0.5);
            support += on as usize;
        }
        println!(
            "{m}x{n}: energy {:.3}, theta {}, lattice points {support} (MN = {}), predicate matches AF: {agree}, fast path error {fast_err:.1e}",
            pilot.energy(),
            lattice.theta,
            grid.mn()
        );
    }
    Ok(())
}
