//! Exact arithmetic in `F_q` and `F_{q^n} = F_q[X]/(f)`.

mod base;
mod ext;
mod poly;

pub use base::{BaseElem, BaseField, FieldParams, MAX_Q};
pub use ext::{ConstMul, ExtElem, FieldContext, MAX_FIELD_SIZE};
pub use poly::FqPoly;

pub(crate) use ext::code_of;
