"""Spin-flip probability |t_du|^2 + |r_du|^2 versus k for each mixing family."""
import argparse

import numpy as np

from spinflip.extension_algebra import FAMILIES, m_family
from spinflip.scattering1d import MatchingError, scatter
from spinflip.cli import parse_complex


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", default="1,0.5", help="coupling 're,im'")
    ap.add_argument("--kmin", type=float, default=0.1)
    ap.add_argument("--kmax", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=40)
    args = ap.parse_args()
    z = parse_complex(args.z)
    print("k," + ",".join(f"flip_family{f}" for f in FAMILIES))
    for k in np.linspace(args.kmin, args.kmax, args.steps):
        cells = []
        for fam in FAMILIES:
            try:
                a = scatter(m_family(fam, z), float(k), "left")
                cells.append(f"{abs(a.t[1, 0]) ** 2 + abs(a.r[1, 0]) ** 2:.6f}")
            except MatchingError:
                cells.append("nan")
        print(f"{k:.4f}," + ",".join(cells))


if __name__ == "__main__":
    main()
