"""Smoke test for the hiernet extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/hiernet-*.whl
Then run with python or pytest.
"""

import json

import hiernet


def test_graph_roundtrip():
    g = hiernet.DiGraph(3, [(0, 1), (1, 2)])
    assert g.n == 3 and len(g) == 2
    assert hiernet.DiGraph.from_json(g.to_json()) == g
    assert json.loads(g.to_json()) == {"n": 3, "edges": [[0, 1], [1, 2]]}
    assert "0 -> 1" in g.to_dot()
    assert g.levels() == [0, 1, 2]


def test_pair_team_utilities():
    i, j, k, m = 0, 1, 2, 3
    g = hiernet.DiGraph(4, [(j, i), (m, i), (i, j), (m, j), (i, k)])
    p = hiernet.UtilityParams(1.0, 1.0, table=[0.0, 1.5, 3.0, 4.5])
    u = hiernet.utilities(g, p)
    assert u == [2 + 1.5 - 0.5, 1 + 1.5 - 0.5, 3.0 - 1, 2 + 0.0]
    assert hiernet.utility(g, k, p) == u[k]
    assert g.classify()["is_sequential_hierarchy"] is False


def test_equilibrium_and_enumeration():
    p = hiernet.UtilityParams(1.0, 1.0, table=[0.0, 1.5, 3.0])
    k3 = hiernet.DiGraph.complete(3)
    assert hiernet.is_equilibrium(k3, p, "non-consensual")
    cert = hiernet.certify(hiernet.DiGraph(3, [(0, 1), (1, 2), (2, 0)]), p, "non-consensual")
    assert cert["is_equilibrium"] is False and cert["violations"]
    eqs = hiernet.enumerate_equilibria(3, p, "non-consensual")
    assert eqs == [k3]


def test_dynamics():
    p = hiernet.UtilityParams(1.0, 1.0, table=[0.0, 3.0, 6.0])
    r = hiernet.run(3, p, "consensual", seed=1, scripted=[(0, 1), (0, 2), (2, 1)])
    assert r["converged"] and r["final_graph"]["edges"] == [[0, 1], [0, 2], [2, 1]]
    assert r == hiernet.run(3, p, "consensual", seed=1, scripted=[(0, 1), (0, 2), (2, 1)])
    s = hiernet.batch(3, p, "consensual", runs=2000, seed=7)
    assert s["converged"] == 2000 and len(s["classes"]) == 2


def test_cross_validate():
    report = hiernet.cross_validate(3)
    assert report["total_mismatches"] == 0
    assert all(x["subset"] for x in report["nesting"])


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
