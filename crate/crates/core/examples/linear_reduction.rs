//! Reduction of a skew form on R^6 by a subspace S: N = S^⊥, ker α_N and the
//! nondegenerate quotient.

use presym::linred::{kernel, linear_reduce, LinForm, Subspace};
use presym::symexpr::rat;

fn main() -> presym::error::Result<()> {
    let n = 6;
    // dx0^dx1 + dx2^dx3, degenerate along e4 and e5.
    let alpha = LinForm::from_components(n, 2, vec![(vec![0, 1], rat(1)), (vec![2, 3], rat(1))])?;
    let e = |i: usize| (0..n).map(|k| rat((k == i) as i64)).collect::<Vec<_>>();
    let e0_plus_e4: Vec<_> = e(0).iter().zip(e(4)).map(|(a, b)| a + b).collect();
    let s = Subspace::span(n, &[e0_plus_e4]);
    let r = linear_reduce(&alpha, &s)?;
    println!("ker α        dim {}", kernel(&alpha).dim());
    println!("N = S^⊥      dim {}", r.n.dim());
    println!("N ∩ S        dim {}", r.n_cap_s.dim());
    println!("ker α_N      dim {}", r.kernel_of_alpha_n.dim());
    println!(
        "quotient     dim {}  rank {}",
        r.quotient_dim,
        r.reduced_form.rank()
    );
    println!(
        "ker α_N = ker α + N∩S: {:?}",
        r.kernel_decomposition_verified
    );
    println!("symplectic (ker α_N = N∩S): {}", r.is_symplectic);
    Ok(())
}
