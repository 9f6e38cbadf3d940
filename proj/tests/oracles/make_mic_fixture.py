"""Regenerates tests/data/mic_datasets.csv and tests/data/mic_reference.csv.

Reference values come from libmine (the C core of minepy), driven by
mine_driver.c in this directory:

    cc -O2 -I<minepy>/libmine mine_driver.c <minepy>/libmine/mine.c -lm -o mine_driver
    python3 make_mic_fixture.py ./mine_driver
"""
import subprocess
import sys

import numpy as np


def relationships(rng, n):
    x = rng.uniform(0.0, 1.0, n)
    yield "linear_noisy", x, x + rng.normal(0, 0.3, n)
    yield "exponential", x, np.exp(2 * x) + rng.normal(0, 0.5, n)
    yield "sine", x, np.sin(4 * np.pi * x) + rng.normal(0, 0.3, n)
    yield "parabola", x, (x - 0.5) ** 2 + rng.normal(0, 0.03, n)
    yield "independent", x, rng.uniform(0.0, 1.0, n)
    yield "step", x, (x > 0.4).astype(float) + rng.normal(0, 0.2, n)
    yield "log", x, np.log(x + 0.01) + rng.normal(0, 0.5, n)
    yield "linear_heavy_noise", x, x + rng.normal(0, 1.0, n)
    yield "vshape", x, np.abs(x - 0.5) + rng.normal(0, 0.05, n)
    yield "cubic", x, 8 * (x - 0.5) ** 3 + rng.normal(0, 0.1, n)


def mic(driver, x, y):
    payload = "\n".join(f"{float(a)!r} {float(b)!r}" for a, b in zip(x, y))
    out = subprocess.run([driver], input=payload, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    driver = sys.argv[1]
    rng = np.random.default_rng(20171107)
    rows, refs = [], []
    sets = list(relationships(rng, 200))
    x = rng.uniform(0, 1, 500)
    sets.append(("null_500", x, rng.uniform(0, 1, 500)))
    for name, x, y in sets:
        rows += [f"{name},{float(a)!r},{float(b)!r}" for a, b in zip(x, y)]
        xm, ym = np.exp(3 * x), y ** 3
        refs.append(f"{name},{len(x)},{mic(driver, x, y):.12f},{mic(driver, xm, ym):.12f}")
    with open("../data/mic_datasets.csv", "w") as f:
        f.write("dataset,x,y\n" + "\n".join(rows) + "\n")
    with open("../data/mic_reference.csv", "w") as f:
        f.write("dataset,n,mic,mic_monotone\n" + "\n".join(refs) + "\n")


if __name__ == "__main__":
    main()
