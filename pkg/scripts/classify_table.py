"""Orbit classification counts and the J3 decay-rate band for a few instances."""
from circlewalk.asymptotics import estimates_check


def main(C1: float = 0.5, C2: float = 1.5):
    for n, k, ell in [(10, 5, 1), (12, 6, 1), (12, 6, 2), (14, 7, 2)]:
        rep = estimates_check(n, k, ell, C1, C2)
        ratios = [r for _, w, r in rep.rows]
        span = f"[{min(ratios):.3f}, {max(ratios):.3f}]" if ratios else "-"
        print(f"({n},{k}) l={ell}: counts {rep.counts}, J3 ratio range {span}, "
              f"band ok {rep.band_ok}, max J1 modulus {rep.j1_max_modulus:.4f} "
              f"< |lambda_I1| {rep.i1_modulus:.4f}: {rep.ordering_ok}")


if __name__ == "__main__":
    main()
