use orbcorr::entanglement::*;
use orbcorr::ssr::{Bipartition, SsrMode};
use orbcorr::*;

fn main() {
    let split = Bipartition::new(4, &[0, 1]).unwrap();
    let cfg = OptimizerConfig::default();
    let mut worst_e = 0.0f64;
    let mut total_ms = 0.0;
    let mut max_ms = 0.0f64;
    let mut runs = 0;
    let mut nonconv = 0;
    for &tu in &[1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0] {
        let params = models::HubbardParams::dimer(tu, 1.0).unwrap();
        let state = models::analytic_state(models::AnalyticState::HubbardDimer(params)).unwrap();
        let rho = rdm::two_orbital_rdm(&state, 0, 1).unwrap();
        let (_, spec) = rdm::one_orbital_rdm(&state, 0).unwrap();
        for ssr in SsrMode::all() {
            let closed = single_orbital_measures(&spec, ssr);
            let t0 = std::time::Instant::now();
            let pa = pair_measures(&rho, ssr, &split, &cfg).unwrap();
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            total_ms += ms; max_ms = max_ms.max(ms); runs += 1;
            if !pa.approximation.converged { nonconv += 1; }
            worst_e = worst_e.max((pa.triple.quantum - closed.quantum).abs());
        }
    }
    println!("worst E diff = {worst_e:.3e}, avg {:.0} ms, max {max_ms:.0} ms, nonconv {nonconv}/{runs}", total_ms / runs as f64);
    // Table checks
    let t = |s: models::AnalyticState, ssr| {
        let state = models::analytic_state(s).unwrap();
        let rho = rdm::two_orbital_rdm(&state, 0, 1).unwrap();
        pair_measures(&rho, ssr, &split, &cfg).unwrap().triple
    };
    let ln2 = std::f64::consts::LN_2;
    let c208 = 0.5 * (4.0f64/3.0).ln();
    let t1 = t(models::AnalyticState::OneElectron, SsrMode::None);
    println!("T1 none err: I {:.1e} E {:.1e} C {:.1e}", (t1.total-2.0*ln2).abs(), (t1.quantum-ln2).abs(), (t1.classical.unwrap()-c208).abs());
    let t1p = t(models::AnalyticState::OneElectron, SsrMode::Parity);
    println!("T1 parity err: I {:.1e} E {:.1e} C {:.1e}", (t1p.total-ln2).abs(), t1p.quantum, (t1p.classical.unwrap()-ln2).abs());
    let t2 = t(models::AnalyticState::DissociatedH2, SsrMode::Number);
    println!("T2 number err: I {:.1e} E {:.1e} C {:.1e}", (t2.total-2.0*ln2).abs(), (t2.quantum-ln2).abs(), (t2.classical.unwrap()-c208).abs());
}
