"""Compare the two readings of the Rashba-type boundary matrices.

For each strength, prints j4_residual and the largest transverse current jump
over the probe states, for the published matrices and for the matrices
obtained by substituting z1 = -i x1, z4 = -x4 into the mixing families.
"""
import argparse

import numpy as np

from spinflip.cli import classify_variant
from spinflip.spin_physics import rashba_bc, substituted_rashba_bc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--values", default="0.1,0.5,0.7,1.5", help="comma-separated strengths")
    args = ap.parse_args()
    values = [float(v) for v in args.values.split(",")]
    print("variant,value,j4_residual,flux_residual_k1,max_abs_d_jy,max_abs_d_jz")
    for kind in ("x1", "x4"):
        for v in values:
            for label, m in ((f"published_{kind}", rashba_bc(kind, v)),
                             (f"substituted_{kind}", substituted_rashba_bc(kind, v))):
                d = classify_variant(m)
                cells = [d["j4_residual"], d["flux_residual_k1"], d["max_abs_d_jy"], d["max_abs_d_jz"]]
                print(",".join([label, repr(v)] + [format(c, ".6g") if np.isfinite(c) else "nan"
                                                    for c in cells]))


if __name__ == "__main__":
    main()
