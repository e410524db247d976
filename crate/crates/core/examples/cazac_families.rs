use zak_cazac::cazac::{periodic_autocorrelation, resolve_family, verify_ca, verify_zac, FamilyTag};
use zak_cazac::grid::papr;
use zak_cazac::GridParams;

fn main() -> zak_cazac::Result<()> {
    let grid = GridParams::new(31, 37, 30_000.0)?;
    let tags = [
        FamilyTag::ZadoffChu { u: 14 },
        FamilyTag::Gaussian { alpha: 5, beta: 3 },
        FamilyTag::Wiener { alpha: 5 },
        FamilyTag::GeneralQuadratic { alpha: 9, beta: 4, gamma: 100 },
    ];
    for tag in tags {
        let fam = resolve_family(tag, &grid)?;
        let p = fam.resolved;
        let x = p.td();
        let acf = periodic_autocorrelation(&x);
        let sidelobe = acf[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let dd = p.dd();
        println!("{tag:?} -> (alpha, beta, gamma) = ({}, {}, {})", p.alpha, p.beta, p.gamma);
        println!(
            "  CA {} ZAC {} peak sidelobe {sidelobe:.1e} PAPR {:.2e} dB, DD energy {:.6}",
            verify_ca(&x, 1e-10),
            verify_zac(&x, 1e-10),
            10.0 * papr(&x)?.log10(),
            dd.energy() / grid.mn() as f64
        );
    }

    // Degenerate chirp rates are rejected up front.
    match resolve_family(FamilyTag::Wiener { alpha: 0 }, &grid) {
        Err(e) => println!("alpha = 0: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
