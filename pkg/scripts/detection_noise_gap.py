"""Compare the simulated hopping-point sensitivity with its plateau closed form.

At phi0 = pi/(2M) the simulated gradient and projection noise are combined
with detection noise dn in quadrature and divided by the closed form
sqrt(2) S^2 sin(mu) / sqrt((S sin mu)^2 + dn^2).  The table shows how far the
cosine-fringe picture is from the exact fringe at the operating point.
"""

import argparse
import math

from echosqueeze import analytics as an
from echosqueeze import protocols as pr


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--mu", type=float, nargs="+", default=[0.3, 0.5, math.pi / 4, 1.0, 1.3])
    args = p.parse_args()
    n = args.n
    S = n / 2
    print(f"{'mu':>7} {'dn/QPN':>7} {'grad/(S M)':>11} {'QPN/(S sin mu)':>15} {'sim/closed':>11}")
    for mu in args.mu:
        spec = pr.build_protocol("GESP_E", "SIMPLIFIED", mu)
        phi0 = an.hopping_operating_point(n, mu)
        grad = abs(pr.phase_gradient(spec, n, phi0, h=1e-6))
        qpn = pr.noise(spec, n, phi0)
        m = math.sqrt(2) * S * math.sin(mu)
        for ratio in (0.0, 1.0, 4.0):
            dn = ratio * S * math.sin(mu)
            sim = grad / math.hypot(qpn, dn)
            closed = an.sensitivity_with_detection_noise(n, mu, dn)
            print(f"{mu:7.4f} {ratio:7.1f} {grad / (S * m):11.4f} {qpn / (S * math.sin(mu)):15.4f} {sim / closed:11.4f}")


if __name__ == "__main__":
    main()
