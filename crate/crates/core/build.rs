fn main() {
    // Dense eigensolves and LU factorizations go through the system LAPACK
    // (shipped inside OpenBLAS on Debian-family images). Only ZGEEV, ZHEEV
    // and ZGESV are used; see src/linalg.rs.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
