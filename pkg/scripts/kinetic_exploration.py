"""Exploratory: regularize the kinetic (x4) coupling and report which family it nears.

No convergence claim is made; the amplitude cap keeps the kinetic coefficient
invertible, so the effective strength shrinks with epsilon.
"""
import argparse

from spinflip.regularization import kinetic_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x4", type=float, default=0.05)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--shape", choices=("rectangle", "bump"), default="bump")
    args = ap.parse_args()
    eps = [0.4, 0.2, 0.1, 0.05, 0.025]
    rep = kinetic_study(args.x4, args.k, eps, shape=args.shape)
    print("epsilon,effective_x4,residual_vs_published,best_family,best_z,best_residual")
    for e, s, r, mt in zip(rep.epsilons, rep.strengths, rep.residuals, rep.matches):
        print(f"{e:.6g},{s:.6g},{r:.6e},{mt.family},{mt.z:.6g},{mt.residual:.3e}")


if __name__ == "__main__":
    main()
