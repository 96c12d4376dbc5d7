"""Smoke test for the Python bindings: python python/smoke_test.py"""

import json
import tempfile

import visblock_py as vb

square = vb.PointSet([(0, 0), (2, 0), (2, 2), (0, 2)], name="square")
assert len(square) == 4 and square.is_general_position()
assert square[1] == ("2/1", "0/1")

rep = vb.min_blocking_set(square)
assert rep["size"] == 5 and rep["optimal"], rep

tri = vb.PointSet([(0, 0), ("1/2", 0), ((1, 3), 5)])
assert vb.min_blocking_set(tri)["size"] == 3

grid = vb.grid(3, 3)
assert len(vb.visibility_edges(grid)) == 28
summary = vb.visibility_summary(grid)
assert summary["diameter"] <= 2
assert summary["clique"]["size"] <= summary["chromatic"]["chi"]
assert vb.monochromatic_line(grid, [1, 2, 1, 2, 1, 2, 1, 2, 1]) is not None

s = vb.sandwich(square)
assert s["holds"] and s["midpoints"] == 5

part = vb.crossing_partition(vb.convex_parabola(6))
assert part["exact"] and part["size"] >= part["lower_bound"]

census = vb.ngon_census(6)
assert (census["center_multiplicity"], census["max_multiplicity_excluding_center"]) == (3, 2)

arcs = vb.arc_drawing(7, samples=8)
assert len(arcs["blockers"]) == 11
assert arcs["blocking"]["passed"] and arcs["simplicity"]["certified"]

knn = vb.knn_drawing(4, parabola=True)
assert len(knn["drawing"]["blockers"]) == 7 and knn["check"]["blocks"]

bundle = vb.generate_json(json.dumps({"kind": "convex_parabola", "n": 5}))
out = vb.run_task("block", json.dumps(bundle))
assert out["status"] == "ok", out

search = vb.low_midpoint_search(8, seed=1, restarts=2)
assert len(search["points"]["points"]) == 8

with tempfile.TemporaryDirectory() as d:
    cfg = {"generator": {"kind": "grid", "w": 3, "h": 3}, "tasks": ["visgraph", "midpoints"]}
    manifest = vb.run(json.dumps(cfg), d)
    assert manifest["schema"] == vb.SCHEMA and manifest["exit_code"] == 0, manifest

try:
    vb.PointSet([(0, 0), (0, 0)])
except ValueError:
    pass
else:
    raise AssertionError("duplicate points accepted")

print("python smoke test passed")
