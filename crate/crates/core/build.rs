fn main() {
    // Link the system OpenBLAS, which bundles BLAS, CBLAS, and LAPACK.
    println!("cargo:rustc-link-lib=openblas");
}
