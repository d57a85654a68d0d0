"""Exhaustive power-sum audit: closed-form bound versus the exact arc maximum."""
import numpy as np

from circlewalk.asymptotics import subgroup_bound, subgroup_bound_check, subgroup_bound_sharp
from circlewalk.configs import StateSpace, xi_array


def main(n_max: int = 14):
    bad = 0
    for n in range(3, n_max + 1):
        for k in range(1, n):
            rep = subgroup_bound_check(n, k)
            if rep.max_slack > 1e-10:
                bad += 1
                J, s, ps, b = rep.violations[0]
                print(f"({n:2d},{k:2d}) slack {rep.max_slack:7.3f}  e.g. s={s} J={J} "
                      f"|p_s|={ps:.4f} > {b:.4f}")
    print(f"{bad} instances violate the closed form")
    # the arc construction gives the exact maximum
    for n, k in [(10, 4), (12, 5), (12, 6), (14, 7)]:
        x = xi_array(n, k, StateSpace(n, k).positions)
        gaps = [abs(np.abs((x ** s).sum(axis=1)).max() - subgroup_bound_sharp(n, k, s))
                for s in range(1, k + 1)]
        print(f"({n},{k}) sharp bound attained, max deviation {max(gaps):.1e}; "
              f"closed form at s=1: {subgroup_bound(n, k, 1):.4f}")


if __name__ == "__main__":
    main()
