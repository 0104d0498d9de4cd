"""Canned sweep grids for the published figure/table scenarios.

Each preset fixes the fault scenario and crosses it with both
conductance-bound modes, the three usual non-linearity settings and the
0%..90% ratio axis. ``--dataset``/``--seeds`` stay with the caller.
Content-named aliases are provided next to the figure/table names.
"""

from __future__ import annotations

from .experiment import SweepGrid, TrialSpec

RATIOS = tuple(round(0.1 * k, 1) for k in range(10))  # 0.0 .. 0.9
V_SETTINGS = ((0.0, 0.0), (3.0, 3.0), (-3.0, -3.0))
BOTH_G_MODES = ("static", "random")
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


def _grid(base: TrialSpec, seeds, **fault) -> SweepGrid:
    return SweepGrid(
        base=base,
        g_modes=BOTH_G_MODES,
        v_settings=V_SETTINGS,
        ratios=RATIOS,
        seeds=tuple(seeds),
        **fault,
    )


def fault_neuron_grid(base: TrialSpec, seeds=DEFAULT_SEEDS) -> SweepGrid:
    """Dead-neuron ratio sweep (the accuracy-cliff scenario)."""
    return _grid(base, seeds, fault_kind="neuron")


def sa0_random_grid(base: TrialSpec, seeds=DEFAULT_SEEDS) -> SweepGrid:
    return _grid(
        base, seeds, fault_kind="synapse", synapse_type="SA0", position_policy="random"
    )


def sa1_random_grid(base: TrialSpec, seeds=DEFAULT_SEEDS) -> SweepGrid:
    return _grid(
        base, seeds, fault_kind="synapse", synapse_type="SA1", position_policy="random"
    )


def sa0_important_grid(base: TrialSpec, seeds=DEFAULT_SEEDS) -> SweepGrid:
    return _grid(
        base, seeds, fault_kind="synapse", synapse_type="SA0", position_policy="important"
    )


def sa1_important_grid(base: TrialSpec, seeds=DEFAULT_SEEDS) -> SweepGrid:
    return _grid(
        base, seeds, fault_kind="synapse", synapse_type="SA1", position_policy="important"
    )


PRESETS = {
    "paper-fig4": fault_neuron_grid,
    "paper-table2": sa0_random_grid,
    "paper-table3": sa1_random_grid,
    "paper-table5": sa0_important_grid,
    "paper-table6": sa1_important_grid,
    # content aliases
    "fault-neurons": fault_neuron_grid,
    "sa0-random": sa0_random_grid,
    "sa1-random": sa1_random_grid,
    "sa0-important": sa0_important_grid,
    "sa1-important": sa1_important_grid,
}
