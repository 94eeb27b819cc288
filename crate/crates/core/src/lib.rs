use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;

pub fn probe() -> f64 {
    let mut m = Array2::<C64>::zeros((2, 2));
    m[[0, 1]] = C64::new(1.0, 0.0);
    m[[1, 0]] = C64::new(1.0, 0.0);
    let (vals, _) = m.eig().unwrap();
    vals.iter().map(|v| v.re.abs()).sum()
}
