//! Exact-derivative scalar fields, differential forms and bracket structures.

pub mod fd;
pub mod field;
pub mod forms;
pub mod jet;
pub mod poisson;
pub mod poly;

pub use field::{lift, Field, ScalarField};
pub use forms::{exterior_derivative, FormField, FormValue};
pub use jet::{Jet, Scalar};
pub use poisson::{lie_poisson_so6, reduced_bracket, ConstraintSet, PoissonChart, PoissonTensor, ReducedBracket};
pub use poly::Polynomial;
