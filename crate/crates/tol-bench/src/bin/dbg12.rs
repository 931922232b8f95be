use tol_core::C64 as Complex64;
use tol_core::roots::classify_region;
use tol_core::{Dist, FieldEvaluator, NoiseSource, Symbol};
type C64 = Complex64;

fn main() {
    for (s, wind, box_re, box_im) in [
        (Symbol::limacon(), 1i64, (-0.5, 1.9), (-1.4, 1.4)),
        (Symbol::ellipse(), -1i64, (-1.4, 1.4), (-1.4, 1.4)),
    ] {
        // margin histogram of the grid
        let mut margins = vec![];
        let mut grid = vec![];
        for i in 0..20 {
            for j in 0..20 {
                let z = C64::new(
                    box_re.0 + (box_re.1 - box_re.0) * (i as f64 + 0.5) / 20.0,
                    box_im.0 + (box_im.1 - box_im.0) * (j as f64 + 0.5) / 20.0,
                );
                if let Ok(r) = classify_region(&s, z) {
                    if r.wind_index == wind && r.margin >= 0.15 {
                        margins.push(r.margin);
                        grid.push(r);
                    }
                }
            }
        }
        margins.sort_by(f64::total_cmp);
        println!("{s}: {} grid points, margin min {:.3} q25 {:.3} median {:.3}",
            grid.len(), margins[0], margins[margins.len()/4], margins[margins.len()/2]);
        for seed in [1212u64, 7, 99, 1234, 777] {
            let src = NoiseSource::new(seed, Dist::ComplexGaussian);
            let fe = FieldEvaluator::new(&s, wind, 24, src).unwrap();
            let sup = |lo: u32, hi: u32| -> (f64, f64) {
                let mut best = 0.0; let mut marg = 0.0;
                for r in &grid {
                    let v = fe.eval_shell(&r.lambdas, lo, hi).norm();
                    if v > best { best = v; marg = r.margin; }
                }
                (best, marg)
            };
            let (d12, m12) = sup(12, 16);
            let (d16, m16) = sup(16, 20);
            let (d20, m20) = sup(20, 24);
            println!("  seed {seed}: D12 {d12:.3e}(m={m12:.2}) D16 {d16:.3e}(m={m16:.2}) D20 {d20:.3e}(m={m20:.2})  ratios {:.2} {:.2}",
                d16/d12, d20/d16);
        }
    }
}
