//! Self- and cross-ambiguity of CAZAC waveforms on the 31 x 37 grid.
//! Pass a directory to also write the self-ambiguity surface as CSV.

use zak_cazac::ambiguity::{
    cross_af_flatness, dd_ambiguity, max_flatness_deviation, on_self_af_line, self_af_closed_form, td_ambiguity,
};
use zak_cazac::cazac::{resolve_family, FamilyTag};
use zak_cazac::export::write_surface_csv;
use zak_cazac::GridParams;

fn main() -> zak_cazac::Result<()> {
    let grid = GridParams::new(31, 37, 30_000.0)?;
    let p = resolve_family(FamilyTag::ZadoffChu { u: 14 }, &grid)?.resolved;
    let x = p.dd();

    let t = std::time::Instant::now();
    let af = dd_ambiguity(&x, &x)?;
    println!("1147 x 1147 DD self-ambiguity in {:.2?}", t.elapsed());

    let (mut on_min, mut off_max, mut closed) = (f64::INFINITY, 0.0f64, 0.0f64);
    for ((k, l), v) in af.iter() {
        let (k, l) = (k as i64, l as i64);
        if on_self_af_line(&p, k, l) {
            on_min = on_min.min(v.norm());
        } else {
            off_max = off_max.max(v.norm());
        }
        closed = closed.max((v - self_af_closed_form(&p, k, l)).norm());
    }
    println!("on the line 14k = l: min |A| = {on_min:.12}");
    println!("off the line:       max |A| = {off_max:.2e}");
    println!("closed form max deviation    {closed:.2e}");

    let td = td_ambiguity(&p.td(), &p.td())?;
    println!("TD ambiguity of the sequence differs by {:.2e}", af.max_deviation(&td));

    let q = resolve_family(FamilyTag::ZadoffChu { u: 6 }, &grid)?.resolved;
    let flat = cross_af_flatness(&p, &q)?;
    let cross = dd_ambiguity(&x, &q.dd())?;
    println!(
        "cross-ambiguity with u=6: eligible {}, |A| = 1/sqrt(MN) = {:.6} within {:.2e}",
        flat.eligible,
        flat.magnitude,
        max_flatness_deviation(&cross, flat.magnitude)
    );

    if let Some(dir) = std::env::args().nth(1) {
        let path = std::path::Path::new(&dir).join("af_dd.csv");
        std::fs::create_dir_all(&dir)?;
        write_surface_csv(&path, &af)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
