use gerf::special::lambert_w0;
use gerf::prox::{prox_gerf, prox_gerf_p1, ProxQuery};
use gerf::imaging::shepp_logan;

fn main() {
    let e = std::f64::consts::E;
    println!("lambert(-1/e) = {:?}", lambert_w0(-1.0 / e));
    println!("eta at -1/e: {:e}", 2.0 * (e * (-1.0 / e) + 1.0));

    // near-hard prox
    let q = ProxQuery::new(1.5, 1.0, 2.0, 0.1).unwrap();
    println!("prox(1.5, mu=1, p=2, s=0.1) = {:?}", prox_gerf(&q));

    // soft limit grid
    for i in 0..8 {
        let x = -4.0 + 0.2 * (i as f64) * 5.0;
        let q = ProxQuery::new(x, 1.0, 2.0, 100.0).unwrap();
        println!("x={x}: prox={:?} soft={}", prox_gerf(&q), if x > 1.0 {x-1.0} else if x < -1.0 {x+1.0} else {0.0});
    }

    // p1 vs general mismatch hunt
    use rand::Rng;
    let mut rng = gerf::core::stream_rng(9, &[2]);
    let mut worst = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..500 {
        let x: f64 = rng.gen_range(-5.0..5.0);
        let mu = rng.gen_range(0.05..3.0);
        let sigma = 10f64.powf(rng.gen_range(-1.0..2.0));
        let a = prox_gerf_p1(x, mu, sigma).unwrap();
        let b = prox_gerf(&ProxQuery::new(x, mu, 1.0, sigma).unwrap()).unwrap();
        let d = (a - b).abs();
        if d > worst.0 { worst = (d, x, mu, sigma); }
    }
    println!("worst p1 mismatch: d={:e} at x={} mu={} sigma={}", worst.0, worst.1, worst.2, worst.3);
    let (_, x, mu, sigma) = worst;
    println!("  p1 path: {:?}", prox_gerf_p1(x, mu, sigma));
    println!("  gen path: {:?}", prox_gerf(&ProxQuery::new(x, mu, 1.0, sigma).unwrap()));

    // phantom symmetry hunt
    let n = 128;
    let img = shepp_logan(n).unwrap();
    'outer: for i in 0..n/2 {
        for j in 0..n {
            let m = img[i*n + (n-1-j)];
            if (img[i*n+j] - m).abs() > 1e-12 {
                println!("asym at ({i},{j}): {} vs {}", img[i*n+j], m);
                break 'outer;
            }
        }
    }
    println!("done");
}
