//! Numerical rank, Moore–Penrose pseudoinverse and orthoprojectors of a
//! rank-deficient matrix.

use resonance_bvp::linalg::{cokernel_projector, kernel_projector, matrix_from_rows, numerical_rank, pseudoinverse, Tolerance};

fn main() -> resonance_bvp::Result<()> {
    let m = matrix_from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![1.0, 0.0, 1.0]])?;
    let rank = numerical_rank(&m, Tolerance::Default)?;
    println!("singular values {:?}", rank.singular_values.as_slice());
    println!("rank {} (kernel {}, cokernel {})", rank.rank, rank.kernel_dim(), rank.cokernel_dim());

    let pinv = pseudoinverse(&m, &rank);
    println!("M⁺ = {pinv:.6}");
    let residuals = [
        (&m * &pinv * &m - &m).norm(),
        (&pinv * &m * &pinv - &pinv).norm(),
        ((&m * &pinv).transpose() - &m * &pinv).norm(),
        ((&pinv * &m).transpose() - &pinv * &m).norm(),
    ];
    println!("Penrose residuals {:.2e} {:.2e} {:.2e} {:.2e}", residuals[0], residuals[1], residuals[2], residuals[3]);

    let pk = kernel_projector(&m, &rank);
    let pc = cokernel_projector(&m, &rank);
    println!("‖M P_N(M)‖ = {:.2e}, ‖P_N(Mᵀ) M‖ = {:.2e}", (&m * &pk).norm(), (&pc * &m).norm());
    Ok(())
}
