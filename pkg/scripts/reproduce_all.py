"""Regenerate every bundled example and write a JSON summary.

Usage: python3 scripts/reproduce_all.py [--out results/reproduce.json]
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from funcctl.numlin import TolerancePolicy
from funcctl.reproduce import EXAMPLES, reproduce


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/reproduce.json")
    args = parser.parse_args()

    tol = TolerancePolicy.from_env()
    summary = {}
    for name in EXAMPLES:
        checks = reproduce(name, tol)
        passed = sum(c.passed for c in checks)
        print(f"{name}: {passed}/{len(checks)}")
        for c in checks:
            if not c.passed:
                print(f"  FAIL {c.name}: {c.detail}")
        summary[name] = [c.to_dict() for c in checks]

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(summary, indent=2) + "\n")
    print(f"wrote {out}")
    return 0 if all(c["passed"] for v in summary.values() for c in v) else 1


if __name__ == "__main__":
    raise SystemExit(main())
