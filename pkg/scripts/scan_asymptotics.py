"""Scaled deficits of each strategy against their large-N limits.

For the optimal strategy the leading form xi^2/N^2 is approached slowly;
the column (N+3)^2 (1-F) shows the shifted form converges much faster.
"""
import argparse

from spindir.fidelity import BESSEL_J0_FIRST_ZERO, deficit

parser = argparse.ArgumentParser()
parser.add_argument("--n-max", type=int, default=120)
parser.add_argument("--step", type=int, default=10)
args = parser.parse_args()

xi2 = BESSEL_J0_FIRST_ZERO ** 2
print(f"{'N':>4} {'N(1-F_P)':>10} {'N(1-F_A)':>10} {'N^2(1-F_O)':>11} {'(N+3)^2(1-F_O)':>15} {'rel.err O':>10}")
for n in range(args.step, args.n_max + 1, args.step):
    o = deficit("O", n)
    print(f"{n:>4} {n * deficit('P', n):>10.5f} {n * deficit('A', n):>10.5f} {n * n * o:>11.5f} "
          f"{(n + 3) ** 2 * o:>15.6f} {n * n * o / xi2 - 1:>+10.4f}")
print(f"limits: 1, 0.5, xi^2 = {xi2:.6f}")
