import numpy as np
import pytest

from loewner import MapChain, SampledDriving, SlitPolyline, drive_from_slit, trace_single


@pytest.fixture(scope="session", autouse=True)
def warmup_kernels():
    # first kernel invocation pays the JIT compile; keep it out of timings
    trace_single(SampledDriving.constant(0.0, 1.0), 8)
    drive_from_slit(SlitPolyline(np.array([0.0, 0.2 + 1.0j, 2.0j])), dcap=1e-2)


@pytest.fixture()
def rng():
    return np.random.default_rng(20250810)


def random_chain(rng, n_maps: int, scale: float = 1.0) -> MapChain:
    """Chain of random vertical/tilted maps with bounded coefficients."""
    chain = MapChain()
    base = 0.0
    for _ in range(n_maps):
        base += rng.normal() * 0.2 * scale
        c = float(rng.uniform(-4.0, 4.0)) if rng.random() < 0.7 else 0.0
        dur = float(rng.uniform(0.2, 1.5)) * scale * scale / n_maps
        chain.push_tilted(base, c, dur)
    return chain
