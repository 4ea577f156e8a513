"""Print the optimal-recovery constants for the supported smoothness values."""

import sys

from sharpreg.optimal_recovery import make_family

sigma = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
L = float(sys.argv[2]) if len(sys.argv) > 2 else 1.0
print(f"{'s':>5} {'phi_s(0)':>10} {'T_s':>8} {'c_s':>8} {'P':>8} {'B(s,1)':>8} {'|K|_2':>8}")
for s in (0.25, 0.5, 0.75, 1.0, 2.0):
    f = make_family(s, sigma, L)
    print(f"{s:>5} {f.phi0:>10.6f} {f.T:>8.4f} {f.c:>8.4f} {f.P:>8.5f} {f.B1:>8.5f} {f.normK2:>8.5f}")
