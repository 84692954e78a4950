"""
Regenerate the calibrated maximal-function constants shipped with nlslab.

The pointwise bound |P f| <= C M f holds with an unspecified C.  This
script measures the worst ratio over a 40-field calibration ensemble on
a 32^3 box (seeds disjoint from the ones the property suite uses) and
freezes it in ``src/nlslab/calibrated_constants.txt``.  The suite then
asserts that fresh fields stay within 10% of the frozen value.

    python3 notebooks/calibrate_constants.py
"""

from pathlib import Path

from nlslab.grid import make_grid
from nlslab.littlewood_paley import write_constants
from nlslab.properties import maximal_constants

N_FIELDS, SEED = 40, 1000
TARGET = Path(__file__).resolve().parents[1] / "src" / "nlslab" / "calibrated_constants.txt"


def main() -> None:
    grid = make_grid(3, 32, 8.0)
    mc = maximal_constants(grid, N_FIELDS, SEED)
    constants = {
        "maximal_band_3d": float(mc["band"].max()),
        "maximal_low_3d": float(mc["low"].max()),
    }
    write_constants(
        TARGET,
        constants,
        comment=[
            "Empirical constants C in |P f| <= C M f (M: centered dyadic-cube maximal function).",
            f"Worst pointwise ratio over {N_FIELDS} fields (seeds {SEED}..{SEED + N_FIELDS - 1}),",
            "alternating periodic and windowed smooth fields, 32^3 grid, L = 8, all resolvable N.",
            "Regenerate with: python3 notebooks/calibrate_constants.py",
        ],
    )
    for k, v in constants.items():
        print(f"{k} = {v:.6f}")


if __name__ == "__main__":
    main()
