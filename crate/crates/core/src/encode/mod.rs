//! Encodings of FORALL-PMVC and of plain perfect matching.

pub mod asp;
pub mod exactone;
pub mod pb;
pub mod pbxor;
pub mod qbf;
pub mod tutte;

pub use asp::{decode_answer, emit_asp_tutte, validate_asp};
pub use exactone::{build_exactone_cnf, build_exactone_pb, decode_matching};
pub use pb::{PbConstraint, PbFormula, PbOp, XorConstraint};
pub use pbxor::emit_pbxor_tutte;
pub use qbf::{build_qbf, QbfAnswer, QbfFormula, Quantifier};
pub use tutte::{
    build_tutte, build_tutte_uncolored, build_tutte_with, check_symmetric_set, decode_witness, verify_witness,
    TutteOptions, Witness,
};
