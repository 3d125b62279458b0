fn main() {
    // LAPACK and CBLAS both come from the system OpenBLAS.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
