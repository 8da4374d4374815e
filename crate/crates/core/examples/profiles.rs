use ipfefr_core::params::Params;

fn main() {
    for name in ["micro", "demo", "toy", "n64"] {
        let p = Params::profile(name).unwrap();
        println!(
            "{name}: n={} m={} l1={} l2={} p={} (h={}) k={} rho1={:.1} rho2={:.2} sigma1={:.3e} sigma2={:.1} t={} violations={}",
            p.n, p.m, p.l1, p.l2, p.p, p.h(), p.k, p.rho1, p.rho2, p.sigma1, p.sigma2, p.t(),
            p.validate().len()
        );
    }
}
