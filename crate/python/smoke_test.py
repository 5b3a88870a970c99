"""Smoke test of the Python bindings: catalog examples, a scan and a mesh."""

import json
import math

import transurf_py as ts


def main():
    s0 = ts.Surface.pair("s0", window=[-2, 2, -2, 2])
    pts = s0.singular_points()
    assert len(pts) == 1 and abs(pts[0][0]) < 1e-9 and abs(pts[0][1]) < 1e-9, pts
    c = s0.classify(0.0, 0.0)
    assert c.verdict == "CrossCap", c
    assert abs(c.value("s0_value") + 1.0) < 1e-8

    assert ts.Surface.pair("s1p").classify(0.0, 0.0).verdict == "S1Plus"
    assert ts.Surface.pair("s1m").classify(0.0, 0.0).verdict == "S1Minus"

    s = ts.Surface.self_translation("@self_s1p", "plus")
    r = s.classify(0.0, math.pi)
    assert r.verdict == "S1Plus", r
    assert abs(r.value("frenet_s1_value") + 16.0) < 1e-4

    helix = "(0.6*cos(t/sqrt(1.36)), 0.6*sin(t/sqrt(1.36)), t/sqrt(1.36))"
    sp = ts.Surface.from_curves(helix, "@s0_b", frame_a="frenet")
    assert sp.classify(0.3, 0.4).verdict == "RegularPoint"

    report = json.loads(s0.scan_report())
    assert report["singular_points"][0]["verdict"] == "CrossCap"

    obj = ts.Surface.pair("s1p", window=[-2, 2, -2, 2], grid=33).mesh()
    lines = obj.splitlines()
    assert sum(l.startswith("v ") for l in lines) == 1089
    assert sum(l.startswith("f ") for l in lines) == 2048

    ok, summary = ts.run_verify("lemma")
    assert ok, summary
    print("python smoke test passed")


if __name__ == "__main__":
    main()
