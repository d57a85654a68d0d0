"""ASEP gap across drift parameters and dimer gap predictions versus the exact gap."""
from circlewalk.models import build_asep, build_dimer
from circlewalk.spectral import gap


def main():
    for n, k in [(16, 8), (15, 5)]:
        gs = {ab: gap(build_asep(n, k, *ab)).gamma_exact for ab in [(2, 0), (1, 1), (0, 2)]}
        print(f"ASEP ({n},{k}): " + ", ".join(f"{ab}: {g:.12f}" for ab, g in gs.items()))
    print(f"\n{'n':>4} {'exact':>10} {'first order':>12} {'stated':>10} {'ratio':>7}")
    for n in (20, 40, 80, 160):
        m = build_dimer(n, n // 2, 1.0, 1.0)
        g = gap(m).gamma_exact
        pred = m.meta["gamma_first_order"]
        print(f"{n:4d} {g:10.6f} {pred:12.6f} {m.meta['gamma_stated_k']:10.6f} {g / pred:7.4f}")


if __name__ == "__main__":
    main()
