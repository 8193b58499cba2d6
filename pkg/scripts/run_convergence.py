"""Shrink a regularized sigma_y coupling and watch it approach the point limit."""
import argparse

from spinflip.regularization import Profile, RegularizedCoupling, converge_study
from spinflip.spin_physics import SIGMA_Y


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shape", choices=("rectangle", "bump"), default="rectangle")
    ap.add_argument("--strength", type=float, default=1.0)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--levels", type=int, default=6, help="number of halvings from eps=0.4")
    args = ap.parse_args()
    eps = [0.4 / 2 ** i for i in range(args.levels)]
    base = RegularizedCoupling(Profile(args.shape, eps[0]), args.strength * SIGMA_Y)
    rep = converge_study(base, args.k, eps)
    print("epsilon,residual,matched_family,matched_z")
    for e, r, mt in zip(rep.epsilons, rep.residuals, rep.matches):
        print(f"{e:.6g},{r:.6e},{mt.family},{mt.z:.6g}")
    print(f"# fitted order {rep.order:.4f}")


if __name__ == "__main__":
    main()
