//! Thin safe wrappers over the LAPACK divide-and-conquer symmetric/Hermitian
//! eigensolvers (`?syevd`, `?heevd`) from the system OpenBLAS.

use ndarray::{Array2, ArrayView2, ShapeBuilder};
use num_complex::Complex;
use std::os::raw::{c_char, c_int};

use crate::error::{Error, Result};

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Precision-specific LAPACK entry points. Sealed: implemented for `f32`/`f64`.
pub trait Lapack: sealed::Sealed + Sized + Copy {
    /// Real symmetric eigenproblem on a column-major `n x n` buffer.
    /// On success `a` holds the eigenvectors (columns) when `vectors` is set.
    fn syevd(vectors: bool, n: usize, a: &mut [Self], w: &mut [Self]) -> i32;

    /// Complex Hermitian eigenproblem on a column-major `n x n` buffer.
    fn heevd(vectors: bool, n: usize, a: &mut [Complex<Self>], w: &mut [Self]) -> i32;
}

macro_rules! impl_lapack {
    ($t:ty, $syevd:ident, $heevd:ident) => {
        impl Lapack for $t {
            fn syevd(vectors: bool, n: usize, a: &mut [Self], w: &mut [Self]) -> i32 {
                debug_assert_eq!(a.len(), n * n);
                debug_assert_eq!(w.len(), n);
                let jobz = if vectors { b'V' } else { b'N' } as c_char;
                let uplo = b'L' as c_char;
                let ni = n as c_int;
                let lda = ni.max(1);
                let mut info: c_int = 0;
                let mut work_query: $t = 0.0;
                let mut iwork_query: c_int = 0;
                let query: c_int = -1;
                unsafe {
                    lapack_sys::$syevd(
                        &jobz,
                        &uplo,
                        &ni,
                        a.as_mut_ptr(),
                        &lda,
                        w.as_mut_ptr(),
                        &mut work_query,
                        &query,
                        &mut iwork_query,
                        &query,
                        &mut info,
                    );
                }
                if info != 0 {
                    return info;
                }
                let lwork = (work_query as usize).max(1);
                let liwork = (iwork_query as usize).max(1);
                let mut work = vec![0.0 as $t; lwork];
                let mut iwork = vec![0 as c_int; liwork];
                unsafe {
                    lapack_sys::$syevd(
                        &jobz,
                        &uplo,
                        &ni,
                        a.as_mut_ptr(),
                        &lda,
                        w.as_mut_ptr(),
                        work.as_mut_ptr(),
                        &(lwork as c_int),
                        iwork.as_mut_ptr(),
                        &(liwork as c_int),
                        &mut info,
                    );
                }
                info
            }

            fn heevd(vectors: bool, n: usize, a: &mut [Complex<Self>], w: &mut [Self]) -> i32 {
                debug_assert_eq!(a.len(), n * n);
                debug_assert_eq!(w.len(), n);
                let jobz = if vectors { b'V' } else { b'N' } as c_char;
                let uplo = b'L' as c_char;
                let ni = n as c_int;
                let lda = ni.max(1);
                let mut info: c_int = 0;
                let mut work_query = Complex::<$t>::new(0.0, 0.0);
                let mut rwork_query: $t = 0.0;
                let mut iwork_query: c_int = 0;
                let query: c_int = -1;
                // num_complex::Complex is #[repr(C)] { re, im }, same layout as
                // the bindgen complex type.
                unsafe {
                    lapack_sys::$heevd(
                        &jobz,
                        &uplo,
                        &ni,
                        a.as_mut_ptr().cast(),
                        &lda,
                        w.as_mut_ptr(),
                        (&mut work_query as *mut Complex<$t>).cast(),
                        &query,
                        &mut rwork_query,
                        &query,
                        &mut iwork_query,
                        &query,
                        &mut info,
                    );
                }
                if info != 0 {
                    return info;
                }
                let lwork = (work_query.re as usize).max(1);
                let lrwork = (rwork_query as usize).max(1);
                let liwork = (iwork_query as usize).max(1);
                let mut work = vec![Complex::<$t>::new(0.0, 0.0); lwork];
                let mut rwork = vec![0.0 as $t; lrwork];
                let mut iwork = vec![0 as c_int; liwork];
                unsafe {
                    lapack_sys::$heevd(
                        &jobz,
                        &uplo,
                        &ni,
                        a.as_mut_ptr().cast(),
                        &lda,
                        w.as_mut_ptr(),
                        work.as_mut_ptr().cast(),
                        &(lwork as c_int),
                        rwork.as_mut_ptr(),
                        &(lrwork as c_int),
                        iwork.as_mut_ptr(),
                        &(liwork as c_int),
                        &mut info,
                    );
                }
                info
            }
        }
    };
}

impl_lapack!(f32, ssyevd_, cheevd_);
impl_lapack!(f64, dsyevd_, zheevd_);

fn check_square<A>(m: &ArrayView2<'_, A>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    Ok(r)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric
/// matrix. Only the lower triangle is read.
pub fn eigh_symmetric<T: Lapack + num_traits::Zero>(m: ArrayView2<'_, T>) -> Result<(Vec<T>, Array2<T>)> {
    let n = check_square(&m)?;
    let mut buf = vec![T::zero(); n * n];
    for ((i, j), &v) in m.indexed_iter() {
        buf[i + j * n] = v;
    }
    let mut w = vec![T::zero(); n];
    let info = T::syevd(true, n, &mut buf, &mut w);
    if info != 0 {
        return Err(Error::Eigensolver { info });
    }
    let v = Array2::from_shape_vec((n, n).f(), buf).expect("buffer has n*n entries");
    Ok((w, v))
}

/// Eigenvalues (ascending) of a real symmetric matrix, without vectors.
pub fn eigvalsh_symmetric<T: Lapack + num_traits::Zero>(m: ArrayView2<'_, T>) -> Result<Vec<T>> {
    let n = check_square(&m)?;
    let mut buf = vec![T::zero(); n * n];
    for ((i, j), &v) in m.indexed_iter() {
        buf[i + j * n] = v;
    }
    let mut w = vec![T::zero(); n];
    let info = T::syevd(false, n, &mut buf, &mut w);
    if info != 0 {
        return Err(Error::Eigensolver { info });
    }
    Ok(w)
}

/// Eigenvalues (ascending) of a complex Hermitian matrix, and its eigenvectors
/// as columns when `vectors` is set. Only the lower triangle is read.
pub fn eigh_hermitian<T: Lapack + num_traits::Float>(
    m: ArrayView2<'_, Complex<T>>,
    vectors: bool,
) -> Result<(Vec<T>, Option<Array2<Complex<T>>>)> {
    let n = check_square(&m)?;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n * n];
    for ((i, j), &v) in m.indexed_iter() {
        buf[i + j * n] = v;
    }
    let mut w = vec![T::zero(); n];
    let info = T::heevd(vectors, n, &mut buf, &mut w);
    if info != 0 {
        return Err(Error::Eigensolver { info });
    }
    let v = vectors.then(|| Array2::from_shape_vec((n, n).f(), buf).expect("n*n entries"));
    Ok((w, v))
}
