//! Exact star-products, sun-products and their cochains on polynomial algebras over `Q`.
//!
//! ```
//! use sunstar::{parse_polynomial, PoissonStructure, StarProduct};
//!
//! let moyal = StarProduct::moyal(PoissonStructure::symplectic(2).unwrap()).unwrap();
//! let x1 = parse_polynomial("x1", 2).unwrap();
//! let x2 = parse_polynomial("x2", 2).unwrap();
//! assert_eq!(moyal.star_mul_poly(&x1, &x2, 2).unwrap().to_string(), "x1*x2 + nu");
//! ```

pub mod diffop;
pub mod error;
pub mod exchange;
pub mod expr;
pub mod lie;
pub mod pbw;
pub mod poly;
pub mod sample;
pub mod series;
pub mod star;
pub mod sun;

pub use diffop::{
    apply_bidiffop, apply_diffop, compose_operator_series, fit_diffop, hochschild_coboundary,
    invert_operator_series, BiDiffOp, Cochain, DiffOp, FitOptions, OperatorSeries,
};
pub use error::{Error, Result};
pub use exchange::{OperatorOrder, OperatorTerm};
pub use expr::{parse_ast, parse_polynomial, parse_rational, parse_series, ExprAst};
pub use lie::{
    ad_power, bch_coefficient, bernoulli, f_series, jacobi_check, poisson_bracket, z_coefficient,
    BchContext, BernoulliCache, JacobiReport, LieAlgebra, LinearForm, PoissonStructure,
};
pub use pbw::{gutt_cochain, gutt_decompose, gutt_symmetrize, GuttEngine, PbwElement};
pub use poly::{format_rational, partial_derivative, poly_mul, MultiIndex, Polynomial, Rational};
pub use series::{project_pi, series_mul, NuSeries};
pub use star::{
    apply_equivalence, check_associativity, check_axioms, check_chs, check_covariance, check_eco,
    moyal_cochain, star_mul, AssociativityReport, AxiomReport, CovarianceReport, IdentityReport,
    StarKind, StarProduct,
};
pub use sun::{
    build_star_with_cochains, check_in_EP, check_reconstruction, check_strong_equivalence,
    check_strong_multiplicativity, check_weak_equivalence, equivalence_to_EP, extract_sun_cochains,
    lambda_factor, lemma3_residual, reconstruct_cochain_diffop, reconstruct_sun_cochains, sun_mul,
    symmetrized_star, EpReport, FactorMultiset, PairFailure, PairReport, RefitEntry, SunCochains,
    SunProduct,
};
