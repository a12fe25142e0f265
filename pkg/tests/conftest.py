import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anonroute.world import WorldConfig, build_deployment, n_star_from_ratio, sample_deployment  # noqa: E402


def scenario(points, sources, f=0.3, r=0.3, R=1.0, B0=1.0, v=1.0, finite_speed=False):
    """Hand-placed deployment whose broadcast radius is exactly ``r`` (up to rounding)."""
    n = len(points)
    cfg = WorldConfig(R=R, B0=B0, v=v, n=n, n_star=len(sources), f=f,
                      n_r=n * (r / R) ** 2, seed=0, finite_speed=finite_speed)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    flags = [k in sources for k in range(n)]
    return build_deployment(cfg, xs, ys, flags)


# Scenario A: source s1 at 0.8, relays s2 at 0.55 and s3 at 0.28, all on the x axis.
SCENARIO_A = [(0.8, 0.0), (0.55, 0.0), (0.28, 0.0)]
# Scenario B adds a non-source s2' at (0.55, 0.1) which fires just before s2.
SCENARIO_B = SCENARIO_A + [(0.55, 0.1)]
S1, S2, S3, S2P = 0, 1, 2, 3


@pytest.fixture
def scen_a():
    return scenario(SCENARIO_A, {S1})


@pytest.fixture
def scen_b():
    return scenario(SCENARIO_B, {S1})


def random_small(seed):
    """Random instance with n <= 12 and parameters spread widely."""
    g = np.random.default_rng(seed)
    n = int(g.integers(1, 13))
    n_star = int(g.integers(1, n + 1))
    f = float(g.choice([0.0, 0.1, 0.3, 0.5, 1.0, g.random()]))
    n_r = float(min(n, n * g.uniform(0.05, 0.6)))
    cfg = WorldConfig(n=n, n_star=n_star, f=f, n_r=n_r, seed=int(g.integers(0, 2**63)))
    return sample_deployment(cfg)


def paper_trial(ratio, f, n_r, seed, n=2000):
    return sample_deployment(WorldConfig(n=n, n_star=n_star_from_ratio(ratio, n), f=f,
                                         n_r=n_r, seed=seed))


# criterion name -> (passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
