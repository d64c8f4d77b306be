//! Named mathematical results cited by reports and certificates.

use serde::Serialize;

pub const TENSOR_DETERMINANT: &str = "determinant formula for tensor products";
pub const TENSOR_SWAP: &str = "swap isomorphism for tensor products";
pub const ROOT_SUM_LEMMA: &str = "root-of-unity sum lemma";
pub const BLOCK_DIAGONALIZATION: &str = "circulant block diagonalization";
pub const SYMMETRIC_DECOMPOSITION: &str = "decomposition of tensors of shift-symmetric factorizations";
pub const REDUCED_TENSOR: &str = "reduction of a tensor product modulo one set of variables";
pub const REDUCED_MORPHISM_BLOCKS: &str = "block form of reduced morphisms between tensor products";
pub const SUMMAND_BOUND_DR: &str = "at most dr indecomposable summands";
pub const SUMMAND_BOUND_R: &str = "at most r indecomposable summands for shift-asymmetric factors";
pub const COPRIME_RANK_ONE: &str = "rank-one factorizations with pairwise coprime entries are strongly indecomposable";
pub const STRONG_IND_TENSOR: &str = "tensor products of strongly indecomposable factorizations in disjoint variables";
pub const STRONG_IND_CONSEQUENCES: &str = "consequences of strong indecomposability";
pub const COPRIME_SYMMETRIC_INDECOMPOSABLE: &str =
    "coprime rank-one factor tensored with a shift-invariant factor is indecomposable";
pub const RANK_ONE_ASYMMETRIC_INDECOMPOSABLE: &str =
    "rank-one factor tensored with a shift-asymmetric factor is indecomposable";
pub const JET_REFUTATION: &str = "constant-term obstruction to isomorphism";
pub const SUM_OF_PRODUCTS: &str = "factorizations of sums of products";
pub const MCM_STATISTICS: &str = "generators, rank and multiplicity of tensor-built MCM modules";
pub const ULRICH_EXISTENCE: &str = "Ulrich modules from sums of products";
pub const EXTENSION_CLOSURE: &str = "Ulrich modules are not extension closed over singular hypersurface domains";
pub const INDECOMPOSABLE_ULRICH: &str = "indecomposable Ulrich modules from disjoint coprime products";
pub const ULRICH_COMPLEXITY_BOUND: &str = "tensor construction bounds Ulrich complexity by d^(N-2)";

/// A statement together with the result that justifies it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub statement: String,
    pub source: &'static str,
}

impl Claim {
    pub fn new(statement: impl Into<String>, source: &'static str) -> Claim {
        Claim {
            statement: statement.into(),
            source,
        }
    }
}
