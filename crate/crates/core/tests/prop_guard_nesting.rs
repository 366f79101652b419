mod common;

#[test]
fn guard_nesting() {
    if let Err(e) = common::guard_nesting(48) {
        panic!("{e}");
    }
}
