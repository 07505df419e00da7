//! Framed blow-ups of a regular system of parameters, the divisibility
//! loop, principalization of monomial ideals and trace files.

mod divide;
mod frame;
mod monomialize;
mod trace;

pub use divide::{comparable, divide_monomials, principalize, select_center, tau, DivideOutcome, Principalization, Tau};
pub use frame::{apply as apply_matrix, framed_blowup, substitute, Frame, FrameEvent, Matrix, Reframe, TraceStep};
pub use monomialize::{certify_monomial, monomialize_nondegenerate, MonomialCertificate};
pub use trace::{trace_dot, trace_jsonl, trace_lines, verify_trace, TraceReport};
