import numpy as np
import pytest

from cbpursuit import IntegratorConfig, integrate, scenario_from_config, get_preset
from cbpursuit.systems import FullStateSystem, SpecialCaseSystem


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger JIT compilation once so timing-sensitive tests measure steady state."""
    sc = scenario_from_config(get_preset("fig3b"))
    system = FullStateSystem(sc.graph, sc.params)
    cfg = IntegratorConfig(t_final=0.01, dt=1e-3)
    integrate(system.derivative, system.pack(sc.initial), cfg,
              stepper=system.stepper, min_separation=system.min_separation)
    phase = SpecialCaseSystem(np.pi / 3)
    integrate(phase.derivative, np.array([1.0, 1.0]), cfg, stepper=phase.stepper)
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
