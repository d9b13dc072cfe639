"""Convergence table of Gamma_pm at both transition frequencies.

Usage: python scripts/convergence_study.py [OUTDIR]
"""
import sys
from dataclasses import replace
from pathlib import Path

from obh_entanglement.cli import cmd_convergence
from obh_entanglement.config import RunConfig


def main(outdir="convergence"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for omega in (0.1, 1.0):
        text = cmd_convergence(replace(RunConfig(), omega_a=omega))
        (out / f"convergence_omega_{omega:g}.csv").write_bytes(text.encode("utf-8"))
        print(f"omega_A = {omega:g}\n{text}")


if __name__ == "__main__":
    main(*sys.argv[1:])
