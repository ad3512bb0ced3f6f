"""Smoke test for the reserve_select extension module.

Build the module first (see README), then run:

    python3 python/smoke_test.py [path/to/dir/containing/reserve_select.so]
"""

import json
import sys

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import reserve_select as rs


def check_landscape():
    rough = rs.Landscape.generate(10, 0, 42)
    smooth = rs.Landscape.generate(10, 8, 42)
    assert rough.fragmentation() > smooth.fragmentation()
    assert min(rough.values) == 0.0 and max(rough.values) == 1.0
    assert rs.Landscape(2, [0.0, 1.0, 1.0, 0.0]).fragmentation() == 1.0
    again = rs.Landscape.from_json(rough.to_json())
    assert again.values == rough.values

    counts = rs.distribute_population(rough, 250, 7)
    assert sum(counts) == 250 and len(counts) == 100

    most, least = rs.select_extremes([rough, smooth, rs.Landscape(10, [0.5] * 100)], 1)
    assert most == [0] and least == [2]


def check_dynamics():
    p = rs.LVParams([0.1], [[0.0]], [0.001], dt=0.01, steps=1)
    (after,) = rs.lv_step([50.0], p)
    assert abs(after - 50.025) < 1e-12

    grid = [[0, 3, 7, 250], [1, 1, 0, 9]]
    same = rs.simulate(2, grid, rs.LVParams.zero(2))
    assert rs.round_counts(2, same) == grid
    assert rs.round_counts(1, [[2.5], [99.4999]]) == [[3], [99]]

    try:
        rs.LVParams([0.1], [[0.5]], [0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("nonzero competition diagonal accepted")


def check_solver():
    prob = rs.ReserveProblem([[6, 5, 5]], [(1, 1)], [3, 2, 2], 4)
    dp = prob.solve_dp()
    assert dp.protected() == [1, 2] and dp.objective == (10, 1) and dp.spent == 4
    assert prob.solve_bruteforce().x == dp.x

    unit = rs.ReserveProblem([[5, 5, 2]], [(1, 1)], [1, 1, 1], 1)
    assert unit.solve_topk().protected() == [0]

    weighted = rs.ReserveProblem([[10], [10]], [(9, 10), (1, 10)], [1], 1)
    assert weighted.parcel_score(0) == (10, 1)

    try:
        rs.ReserveProblem([[1, 2]], [(1, 1)], [1.0, 2.5], 3)
    except ValueError as e:
        assert "rescale" in str(e)
    else:
        raise AssertionError("fractional cost accepted")

    back = rs.ReserveProblem.from_json(prob.to_json())
    assert back.solve_dp().x == dp.x
    assert rs.similarity(dp, dp) == 3


def check_experiment():
    cases = rs.Scenario.defaults(seed=2023, pool_size=200)
    assert [c.name for c in cases] == [f"case{k}" for k in range(1, 7)]
    assert cases[0].species_ids == ["S_0", "S_1"]
    assert cases[4].species_ids == ["S_0", "S_1", "S_2", "S_3", "S_4"]
    assert cases[0].budgets == list(range(0, 101, 5))

    rows = cases[1].sweep()
    assert len(rows) == 21
    assert rows[0].similarity == 100 and rows[-1].similarity == 100
    lo, mean, median = rs.summarize(rows)
    assert 0 <= lo <= mean and lo <= median <= 100

    frozen = cases[1].with_params(rs.LVParams.zero(2)).sweep()
    assert all(r.similarity == 100 for r in frozen)

    weighted = cases[1].with_weights([(9, 10), (1, 10)]).sweep()
    assert weighted[0].similarity == 100 and weighted[-1].similarity == 100

    parsed = json.loads(cases[1].to_json())
    assert parsed["weights"] == [[1, 1], [1, 1]]

    row = rows[11]
    obs, sim = cases[1].observed, cases[1].simulated()
    svg = rs.render_svg(
        10,
        rs.ReserveSolution.from_json(json.dumps({"x": row.x_1, "objective": [0, 1], "spent": 0})),
        obs,
        (rs.ReserveSolution.from_json(json.dumps({"x": row.x_2, "objective": [0, 1], "spent": 0})), sim),
    )
    assert svg.count('<rect class="cell"') == 200
    assert f"{row.similarity}/100 parcels have the same protection status" in svg


if __name__ == "__main__":
    check_landscape()
    check_dynamics()
    check_solver()
    check_experiment()
    print("reserve_select smoke test passed")
