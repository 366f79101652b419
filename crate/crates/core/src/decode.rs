//! Reading concrete values back out of a model.

use crate::error::EngineError;
use crate::logic::Value;
use crate::smt::{Construction, LogicVar, Model, Session, SmtSort};
use crate::spec::Ty;

/// Decodes `x`, logging every variable read as relevant.
pub fn decode(session: &mut Session, x: LogicVar, m: &mut Model) -> Result<Value, EngineError> {
    match session.sort_of(x).clone() {
        SmtSort::Int => Ok(Value::Int(session.int_value(m, x)?)),
        SmtSort::Bool => Ok(Value::Bool(session.bool_value(m, x)?)),
        SmtSort::Data(_) => {
            let alt = if session.has_alternatives(x) {
                session.which_of(x, m)?
            } else {
                x
            };
            let c = session.unapply(alt)?.clone();
            decode_ctor(session, &c, m)
        }
    }
}

pub fn decode_ctor(session: &mut Session, c: &Construction, m: &mut Model) -> Result<Value, EngineError> {
    let Ty::Data(data, _) = &c.ty else {
        return Err(EngineError::Sort(format!("{} is not a datatype", c.ty)));
    };
    let fields = c
        .fields
        .iter()
        .map(|f| decode(session, *f, m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::data(data, &c.ctor, fields))
}
