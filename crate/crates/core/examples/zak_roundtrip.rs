use rand::Rng;
use zak_cazac::grid::inner_product_qp;
use zak_cazac::pilot::{point_pilot, PilotSpec};
use zak_cazac::stats::trial_rng;
use zak_cazac::zak::{basis_dd, basis_td, dzt, idzt, BasisIndex};
use zak_cazac::{GridParams, PeriodicSequence, C64};

fn main() -> zak_cazac::Result<()> {
    let grid = GridParams::new(31, 37, 30_000.0)?;
    println!(
        "grid {}x{}: bandwidth {:.3} MHz, frame {:.3} ms, resolution {:.1} ns x {:.1} Hz",
        grid.m(),
        grid.n(),
        grid.bandwidth() / 1e6,
        grid.duration() * 1e3,
        grid.delay_res() * 1e9,
        grid.doppler_res()
    );

    let mut rng = trial_rng(7, 0);
    let x = PeriodicSequence::from_fn(grid, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let xd = dzt(&x);
    let back = idzt(&xd);
    let err = x.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("energy: time {:.9}, delay-Doppler {:.9}", x.energy(), xd.energy());
    println!("round trip max error {err:.2e}");

    // Quasi-periodicity: one step of M in delay picks up a Doppler phase.
    let (k, l) = (3, 5);
    let lhs = xd.at(k + grid.m() as i64, l);
    let rhs = xd.at(k, l) * zak_cazac::grid::unit_root(l, grid.n());
    println!("X[k+M,l] - e^(j2pi l/N) X[k,l] = {:.2e}", (lhs - rhs).norm());

    // Inner products do not depend on where the M x N window sits.
    let y = dzt(&PeriodicSequence::from_fn(grid, |n| C64::new((n % 7) as f64, 1.0)));
    let a = inner_product_qp(&xd, &y, (0, 0))?;
    let b = inner_product_qp(&xd, &y, (-11, 23))?;
    println!("<X,Y> over shifted windows differ by {:.2e}", (a - b).norm());

    // A DD point pulse is a pulse train in time (a pulsone).
    let pulse = idzt(&point_pilot(PilotSpec::new(grid, 4, 2)));
    let teeth = pulse.samples().iter().filter(|s| s.norm() > 1e-12).count();
    println!("point pulse at (4, 2): {teeth} nonzero time samples, spaced by M = {}", grid.m());

    // A tone burst in one time block spreads flat across the DD domain.
    let idx = BasisIndex::new(4, 2);
    let burst = basis_td(&grid, idx)?;
    let dd = basis_dd(&grid, idx)?;
    let diff = dzt(&burst).sub(&dd)?.energy().sqrt();
    let flat = dd.data().iter().map(|v| v.norm()).fold(0.0, f64::max) * (grid.mn() as f64).sqrt();
    println!("carrier (r=4, s=2): closed form off by {diff:.2e}, sqrt(MN) max|X| = {flat:.6}");
    Ok(())
}
