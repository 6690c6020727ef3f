use singsym::analysis::refinement_study;
use singsym::{DomainSpec, SolveParams, default_schedule};

fn main() {
    let params = SolveParams::default();
    let spec = DomainSpec::interval(-1.0_f64, 1.0);
    for (gamma, h0, levels) in [(1.0, 0.25_f64, 4), (1.0, 0.0625, 4), (4.0, 0.25, 4), (4.0, 0.125, 4), (4.0, 0.0625, 4)] {
        let rows = refinement_study(&spec, gamma, h0, levels, &default_schedule(), &params).unwrap();
        println!("gamma={gamma} h0={h0}:");
        for r in &rows {
            println!("  h={:.5} seminorm={:.6} center={:.8} res={:.2e}", r.h, r.h1_seminorm, r.center_value, r.residual_sup);
        }
        let s: Vec<f64> = rows.iter().map(|r| r.h1_seminorm).collect();
        for w in s.windows(2) { print!("  succ change {:.4}%", 100.0*(w[1]-w[0]).abs()/w[0]); }
        println!("\n  last/first = {:.4}", s[s.len()-1]/s[0]);
    }
}
