from ._orcasim import (
    compute_vo_exit,
    make_crossing,
    run_scenario,
    solve_batch,
    solve_closest_point,
)

__all__ = [
    "compute_vo_exit",
    "make_crossing",
    "run_scenario",
    "solve_batch",
    "solve_closest_point",
]
