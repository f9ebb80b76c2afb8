"""Smoke test for the `ncg` extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import json
import math

import ncg

T2 = """
[geometry]
type = "torus"
n = 2
theta = [[0.0, 0.4142], [-0.4142, 0.0]]
K = 6
"""


def main():
    g = ncg.Geometry.torus(2, [[0.0, 0.4142], [-0.4142, 0.0]], 6)
    assert g.kr_dim == 2 and g.generators == ["U", "V"]
    assert ncg.kr_signs(2) == (-1, 1, -1)

    rep = json.loads(g.verify("triple"))
    assert rep["pass"], [c for c in rep["checks"] if not c["pass"]]

    sols = sorted(g.gamma_search(starts=16, seed=1))
    assert len(sols) == 2, sols
    assert all(abs(abs(c) - 1.0) < 1e-9 and r < 1e-9 for c, r in sols)

    # D on T2 has eigenvalues ±|k|
    spectrum = ncg.Geometry.torus(2, [[0.0, 0.3], [-0.3, 0.0]], 3).dirac_spectrum()
    assert sum(m for _, m in spectrum) == 2 * 7 * 7
    assert all(min(abs(v * v - n) for n in range(19)) < 1e-9 for v, _ in spectrum)

    s3 = ncg.Geometry.sphere(5.5, 0.3, 1.0, "1+0j", 1.0)
    assert json.loads(s3.verify("first_order"))["pass"]
    assert all(abs(2 * (v - 0.25) - round(2 * (v - 0.25))) < 1e-9 for v, _ in s3.dirac_spectrum())

    code, out = ncg.run("verify", T2, suite=["gamma", "descent"])
    assert code == 0 and json.loads(out)["pass"], out
    code, out = ncg.run("verify", T2.replace("K = 6", "K = 1"))
    assert code == 2 and "cutoff below minimum" in out
    code, out = ncg.run("spectrum", T2, operator="D_h", cutoff=3)
    rows = out.strip().splitlines()
    assert rows[0] == "eigenvalue,multiplicity,operator,geometry_hash"
    assert all(math.isclose(abs(float(r.split(",")[0])), round(abs(float(r.split(",")[0]))), abs_tol=1e-9) for r in rows[1:])

    assert ncg.normalize_complex("0.5 - 2j") == "0.5-2j"
    print("smoke test passed")


if __name__ == "__main__":
    main()
