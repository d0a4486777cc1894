"""Monte Carlo estimates for every strategy and N <= 8, written as CSV."""
import argparse
import csv
import sys
import time

from spindir.fidelity import closed_form
from spindir.simulate import estimate_fidelity

parser = argparse.ArgumentParser()
parser.add_argument("--samples", type=int, default=1_000_000)
parser.add_argument("--seed", type=int, default=2024)
parser.add_argument("--workers", type=int, default=4)
parser.add_argument("--n-max", type=int, default=8)
args = parser.parse_args()

out = csv.writer(sys.stdout)
out.writerow(["strategy", "n", "estimate", "stderr", "analytic", "z", "acceptance", "seconds"])
for s in "PAOG":
    for n in range(2 if s == "A" else 1, args.n_max + 1):
        t0 = time.perf_counter()
        rep = estimate_fidelity(s, n, args.samples, args.seed, args.workers)
        f = closed_form(s, n)
        out.writerow([s, n, f"{rep.f_estimate:.7f}", f"{rep.stderr:.2e}", f"{f:.7f}",
                      f"{(rep.f_estimate - f) / rep.stderr:+.2f}", f"{rep.acceptance_rate:.4f}",
                      f"{time.perf_counter() - t0:.2f}"])
