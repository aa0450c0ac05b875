use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module(code: &str) {
    Python::attach(|py| {
        let module = wrap_pymodule!(pyboostcav::pyboostcav)(py);
        let globals = PyDict::new(py);
        globals.set_item("bc", module).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).unwrap();
    });
}

#[test]
fn static_and_boosted() {
    with_module(
        r#"
import math
m0 = -math.pi / 24
for method in ("zeta", "cutoff", "abel-plana"):
    value, err = bc.static_m0(1.0, method)
    assert abs(value - m0) < 1e-8, (method, value)
em = bc.boosted_em("lorentz", 1.0, 0.6)
assert abs(em["energy"] - 2.125 * m0) < 1e-12
assert abs(em["shell_residual"]) < 1e-12
rows = bc.sweep("galileo-comoving", 1.0, [0.3, 0.1])
assert [r["v"] for r in rows] == [0.1, 0.3]
"#,
    );
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(
        r#"
for call in (lambda: bc.static_m0(-1.0), lambda: bc.boosted_em("lorentz", 1.0, 1.0),
             lambda: bc.static_m0(1.0, "nope"), lambda: bc.mode_value("lorentz", 1.0, 0.0, 1, 0.0, 2.0)):
    try:
        call()
    except ValueError:
        pass
    else:
        raise AssertionError("no ValueError")
"#,
    );
}

#[test]
fn modes_and_verify() {
    with_module(
        r#"
u = bc.mode_value("lorentz", 1.0, 0.0, 1, 0.0, 0.5)
assert abs(u - 2 ** 0.5) < 1e-14
assert abs(bc.frequency("galileo-lab", 1.0, 0.2, 3) - 2.88 * 3.141592653589793) < 1e-12
assert all(ok for _, ok, _, _ in bc.verify("modes"))
"#,
    );
}
