//! Cartier-Manin matrices, a-numbers and p-ranks of hyperelliptic curves
//! y^2 = f(x) over finite fields, plus an exhaustive / random search engine
//! over families of such curves.

pub mod curve;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod search;
pub mod verify;

pub use curve::{invariants, CartierMatrix, Curve, CurveError, Invariants};
pub use field::{ArithOp, Elem, Field, FieldElement, FieldError};
pub use linalg::Matrix;
pub use poly::{Poly, PolyError};
pub use report::{ReportError, SCHEMA};
pub use search::{
    run_search, run_search_with_threads, Counts, Mode, SearchError, SearchReport, SearchSpec,
    Witness,
};
pub use verify::{ConsistencyReport, RunOptions};
