//! Means of linear spectral statistics by contour integration.

use rmtbias::contour::{lss_mean, ContourSpec, SpectralFn};
use rmtbias::{mi_clt, scenario};

fn main() -> rmtbias::Result<()> {
    let model = scenario::ula_rician(16, 1.0, scenario::weibull_noncircular())?;
    let sigma2 = 0.2;

    let f = SpectralFn::Mi { sigma2 };
    let mi = mi_clt(&model, sigma2, &Default::default())?;
    for nodes in [32, 64, 128, 256] {
        let spec = ContourSpec::for_function(&model, &f).with_nodes(nodes);
        let r = lss_mean(&model, &f, &spec, &Default::default())?;
        println!(
            "log(1 + x/σ²), {nodes:>3} nodes: V err {:.1e}, B_C err {:.1e}",
            (r.v_f.re - mi.v).abs(),
            (r.b_f.re - mi.b_c).abs()
        );
    }

    // Second spectral moment: E Tr (HHᴴ)².
    let f = SpectralFn::parse("poly:0,0,1", sigma2)?;
    let r = lss_mean(&model, &f, &ContourSpec::for_function(&model, &f), &Default::default())?;
    println!("Tr (HH^H)^2: mean {:.6}, bias {:.6}", r.v_f.re, r.b_f.re);
    Ok(())
}
