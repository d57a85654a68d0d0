"""Stationary point, closed-form gap and saddle-approximation error along k at fixed ratios."""
from circlewalk.asymptotics import gamma_from_saddle, saddle_relative_error, solve_r
from circlewalk.spectral import gamma_ell_exact


def main():
    print(f"{'n':>4} {'k':>4} {'l':>3} {'r':>10} {'|r-r*|k^2':>10} {'err*k*r':>9} "
          f"{'gamma_l':>11} {'saddle gamma':>12}")
    for k in (8, 16, 24, 32, 48):
        n, ell = 2 * k, k // 4
        s = solve_r(n, k, ell)
        err = saddle_relative_error(n, k, ell)
        print(f"{n:4d} {k:4d} {ell:3d} {s.r:10.6f} {s.r_gap * k * k:10.4f} {err * k * s.r:9.4f} "
              f"{gamma_ell_exact(n, k, ell):11.6e} {gamma_from_saddle(n, k, ell):12.6e}")


if __name__ == "__main__":
    main()
