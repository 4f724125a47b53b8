//! Fixed inputs shared by the benchmarks.

use sunstar::{DiffOp, LieAlgebra, NuSeries, OperatorSeries, PoissonStructure, Polynomial, StarProduct};

pub fn moyal_plane() -> StarProduct {
    StarProduct::moyal(PoissonStructure::symplectic(2).expect("even dimension")).expect("constant structure")
}

pub fn gutt_su2() -> StarProduct {
    StarProduct::gutt(LieAlgebra::su2())
}

pub fn twisted_su2() -> StarProduct {
    let b = DiffOp::term(sunstar::MultiIndex::from_slice(&[0, 3, 0]), Polynomial::var(3, 0));
    let t = OperatorSeries::from_higher(3, vec![DiffOp::partial(&[2, 0, 0]), b]).expect("valid twist");
    StarProduct::twist(&gutt_su2(), &t).expect("twist")
}

/// `(x_1 + ... + x_n)^degree` lifted to a series truncated at `order`.
pub fn dense_input(dim: usize, degree: u32, order: usize) -> NuSeries {
    let sum = (0..dim).fold(Polynomial::zero(dim), |acc, i| &acc + &Polynomial::var(dim, i));
    NuSeries::from_polynomial(sum.pow(degree), order)
}
