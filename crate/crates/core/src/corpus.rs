//! The bundled example specifications.

use crate::spec::{parse_spec, SpecError, SpecModule};

pub const SCORES: &str = include_str!("../specs/scores.tspec");
pub const ORDLIST: &str = include_str!("../specs/ordlist.tspec");
pub const RBT: &str = include_str!("../specs/rbt.tspec");
pub const MAP: &str = include_str!("../specs/map.tspec");

pub const ALL: &[(&str, &str)] = &[("scores", SCORES), ("ordlist", ORDLIST), ("rbt", RBT), ("map", MAP)];

pub fn module_src(name: &str) -> &'static str {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).unwrap_or("")
}

pub fn module(name: &str) -> Option<Result<SpecModule, SpecError>> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, src)| parse_spec(src))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_corpus_file_resolves() {
        for (name, src) in ALL {
            let m = parse_spec(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            for f in m.funs() {
                assert!(crate::builtins::lookup(&f.name).is_some(), "{name}: no builtin for {}", f.name);
            }
        }
    }
}
