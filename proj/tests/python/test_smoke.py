"""Smoke tests for the pyleftrs extension module."""

import json
import sys

import pyleftrs


def test_generate_validate_roundtrip():
    doc = pyleftrs.generate(M=3, N=3, rsf=0.5, seed=7)
    system = json.loads(doc)
    assert system["num_cores"] == 3
    assert len(system["tasks"]) == 9
    assert pyleftrs.validate(doc) == []


def test_access_time_primitives():
    assert pyleftrs.msrpft_access(1, [6], 1) == 4
    assert pyleftrs.msrpft_overhead(2) == 15
    assert pyleftrs.checkpointing_access(1, [6], 1) == 7


def test_uunifast_sums():
    us = pyleftrs.uunifast(8, 0.9, seed=3)
    assert len(us) == 8
    assert abs(sum(us) - 0.9) < 1e-9
    assert all(u > 0 for u in us)


def test_analysis_fault_free_equivalence():
    doc = pyleftrs.generate(M=3, N=3, rsf=0.6, f_max=0, seed=11)
    left = pyleftrs.analyze(doc, protocol="leftrs")
    ckpt = pyleftrs.analyze(doc, protocol="checkpointing")
    assert left["schedulable"] == ckpt["schedulable"]
    for a, b in zip(left["tasks"], ckpt["tasks"]):
        assert a["R_us"] == b["R_us"]


def test_simulated_golden_example():
    system = {
        "num_cores": 2,
        "resources": [{"id": 0, "c_us": 1}],
        "tasks": [
            {"id": 0, "core": 0, "C_us": 1, "T_us": 1000, "D_us": 1000,
             "priority": 1, "f_max": 5, "accesses": {"0": 1}},
            {"id": 1, "core": 1, "C_us": 1, "T_us": 1000, "D_us": 1000,
             "priority": 1, "f_max": 0, "accesses": {"0": 1}},
        ],
    }
    out = pyleftrs.simulate(json.dumps(system), horizon_us=50)
    updates = [line for line in out["trace"].splitlines()
               if " resource_update " in line]
    assert len(updates) == 2
    responses = {j["task"]: j["response_us"] for j in out["jobs"]}
    assert responses[1] == 3  # restart after the head's update, then finish


def test_simulation_bounded_by_analysis():
    doc = pyleftrs.generate(M=3, N=3, rsf=0.5, f_max=2, seed=21)
    res = pyleftrs.analyze(doc)
    if not res["schedulable"]:
        return
    bounds = {t["task"]: t["R_us"] for t in res["tasks"]}
    out = pyleftrs.simulate(doc, pattern="sporadic", seed=5, fault_seed=9)
    for job in out["jobs"]:
        if job["completed"]:
            assert job["response_us"] <= bounds[job["task"]]


def test_worst_case_probe():
    assert pyleftrs.worst_case_probe(1, [1], 4) == 8
    assert pyleftrs.worst_case_probe(1, [6], 4) <= 12


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
