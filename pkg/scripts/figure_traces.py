"""Write the four negativity traces (OBH and free space, at and off resonance) as CSV.

Usage: python scripts/figure_traces.py [OUTDIR]
"""
import sys
from dataclasses import replace
from pathlib import Path

from obh_entanglement.cli import NEGATIVITY_COLUMNS, csv_text, negativity_for
from obh_entanglement.config import RunConfig

CASES = {
    "obh_off_resonance": dict(scenario="obh", omega_a=0.1),
    "obh_resonance": dict(scenario="obh", omega_a=1.0),
    "vacuum_off_resonance": dict(scenario="vacuum", omega_a=0.1),
    "vacuum_resonance": dict(scenario="vacuum", omega_a=1.0),
}


def main(outdir="traces"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, changes in CASES.items():
        trace = negativity_for(replace(RunConfig(), **changes))
        (out / f"{name}.csv").write_bytes(csv_text(NEGATIVITY_COLUMNS, trace.rows()).encode("utf-8"))
        t_peak, peak = trace.peak()
        print(f"{name:22s} peak {peak:.4g} at t = {t_peak:.4g}")


if __name__ == "__main__":
    main(*sys.argv[1:])
