"""Observer error and functional decay rates versus the assigned poles.

Sweeps the observer pole of the single-row Example-2 design and the
controller/observer pair of the augmented Example-3 design, simulates the
closed loop from x0 = 1, and prints the fitted log-slopes next to the poles.
"""
from __future__ import annotations

import argparse

import numpy as np

from funcctl import reference as ref
from funcctl.errors import SignalUnderflow
from funcctl.sim import SimConfig, decay_rate, simulate_observer_closed_loop
from funcctl.synthesis import design_observer_based_controller


def fitted(trace, channel, window):
    try:
        return decay_rate(trace, channel, window)
    except SignalUnderflow:
        return float("nan")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--t-final", type=float, default=10.0)
    args = parser.parse_args()
    cfg = SimConfig(args.dt, args.t_final)
    sys = ref.example2_system()
    x0 = np.ones(sys.n)

    print("single functional (Example 2), controller pole -3")
    print(f"{'observer pole':>14} {'e rate':>9} {'z tail rate':>12} {'|z(T)|':>10}")
    for op in (-4.0, -6.0, -8.0, -10.0):
        d = design_observer_based_controller(sys, ref.EXAMPLE2_F, [-3.0], [op], augment="none")
        tr = simulate_observer_closed_loop(sys, d.controller, d.observer, x0, cfg=cfg)
        half = args.t_final / 2
        print(
            # stop the error fit before it reaches the rounding floor
            f"{op:>14.1f} {fitted(tr, 'err', (0.0, min(half, 20.0 / abs(op)))):>9.4f} "
            f"{fitted(tr, 'z', (half, args.t_final)):>12.4f} {np.abs(tr.channel('z')[-1, 0]):>10.2e}"
        )

    print("\naugmented functional (Example 3)")
    for cp, op in (([-3.0, -5.0], [-6.0, -7.0]), ([-1.0, -2.0], [-6.0, -7.0]), ([-2 + 1j, -2 - 1j], [-8.0, -9.0])):
        d = design_observer_based_controller(sys, ref.EXAMPLE3_F, cp, op)
        tr = simulate_observer_closed_loop(sys, d.controller, d.observer, x0, cfg=cfg)
        slowest = max(np.real(cp))
        print(
            f"controller {np.round(cp, 3).tolist()}, observer {op}: "
            f"z tail rate {fitted(tr, 'z', (args.t_final / 2, args.t_final)):.4f} (slowest pole {slowest})"
        )


if __name__ == "__main__":
    main()
