fn f_line(x: &[f64], m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let mut f = x.to_vec();
    for i in 0..n {
        for j in 0..n {
            if i == j { continue; }
            let dx = x[i] - x[j];
            f[i] -= m[j] * dx / (dx.abs().powi(3));
        }
    }
    f
}
fn main() {
    let m = [1.0/3.0; 3];
    // the known solution
    let x = [-0.74690079109286078, 0.0, 0.74690079109286078];
    println!("resid at known solution: {:?}", f_line(&x, &m));
    // residual at an asymmetric point
    let x2 = [-0.8, 0.05, 0.7];
    println!("resid asym: {:?}", f_line(&x2, &m));
}
