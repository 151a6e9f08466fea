"""Print every controller augmentation candidate and its condition checks.

Usage: python3 scripts/augmentation_candidates.py systems/hidden_mode.json
"""
from __future__ import annotations

import argparse

import numpy as np

from funcctl import io
from funcctl.errors import RankDeficient
from funcctl.numlin import null_space_rows, observability_indices
from funcctl.synthesis import build_augmentation_thm16, controller_conditions


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("path")
    args = parser.parse_args()
    spec = io.load_system(args.path)
    sys, F, tol = spec.system, spec.F, spec.tol
    print(f"observability indices of (A, F): {observability_indices(sys.A, F, tol)}")
    candidates = {
        "empty": np.zeros((0, sys.n)),
        "theorem16": build_augmentation_thm16(sys.A, F, tol),
        "full_complement": null_space_rows(F, tol.decision_rtol),
    }
    for name, R1 in candidates.items():
        try:
            cond = controller_conditions(sys, F, R1, tol)
            verdict = f"closure={cond.a} reduced_pair_controllable={cond.b}"
        except RankDeficient as exc:
            verdict = f"rejected: {exc}"
        print(f"{name:>16}: rows={np.round(R1, 6).tolist()}  {verdict}")


if __name__ == "__main__":
    main()
