use cmray::limitformula::{kronecker_check, AnalyticConfig};
use cmray::rayclass::{characters, ray_class_group, Modulus};
use cmray::qfield::Field;

fn main() {
    for (d, n) in [(-7i64, 5u64), (-11, 5), (-15, 7), (-20, 7)] {
        let field = Field::new(d).unwrap();
        let m = Modulus::rational(field, n).unwrap();
        let g = ray_class_group(&m);
        let chi = characters(&g).into_iter().find(|c| !c.is_principal()).unwrap();
        for b in [20_000u64, 100_000, 1_000_000] {
            let w = (b / 100).max(10);
            let cfg = AnalyticConfig::new(192, b, w).unwrap();
            let t0 = std::time::Instant::now();
            let rep = kronecker_check(&g, &chi, &cfg).unwrap();
            println!(
                "d={} n={} B={} W={} residual={:.3e} spread={:.2e} |S|={:.4} t={:?}",
                d, n, b, w, rep.residual, rep.l_spread, rep.stickelberger_abs, t0.elapsed()
            );
        }
    }
}
