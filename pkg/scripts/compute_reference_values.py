#!/usr/bin/env python3
"""Regenerate the frozen reference constants used by the test suite.

Every closed-form quantity asserted in tests/ is recomputed here with
mpmath at 50 significant digits, straight from the defining formulas and
independently of the package code:

    mode overlap          I(dt)  = exp(-pi*g*|dt|) * (1 + pi*g*|dt|)
    two-photon weights    F+-    = 1/2 +- I/(1+I**2)
    fixed-mode weights    P2 = 2I**2/(1+I**2), P1 = (1-I**2)/(1+I**2), P0 = 0
    binomial loss         (P0,P1,P2) -> (.., 2 P2 e(1-e) + P1 e, P2 e**2)
    pair correlation      g2(dt) = 1 + I(dt)**2

plus the half-decay delay of the lossy fixed-mode P2 (root of
I(dt) = 1/sqrt(3)) and the small-delay expansion ratios.  Fock moments
come from exact Gauss-Hermite style quadrature over the oscillator
eigenfunctions.  Run from anywhere:

    python scripts/compute_reference_values.py
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 50

GAMMA = mp.mpf("53e6")
ETA = mp.mpf("0.76")
NS = mp.mpf("1e-9")


def overlap(delta_t):
    x = mp.pi * GAMMA * abs(delta_t)
    return mp.e**-x * (1 + x)


def f_plus(i):
    return mp.mpf(1) / 2 + i / (1 + i * i)


def fixed_p2(i):
    return 2 * i * i / (1 + i * i)


def lossy(p0, p1, p2, eta=ETA):
    return (
        p2 * (1 - eta) ** 2 + p1 * (1 - eta) + p0,
        2 * p2 * eta * (1 - eta) + p1 * eta,
        p2 * eta * eta,
    )


def show(label, value, digits=12):
    print(f"{label:44s} {mp.nstr(mp.mpf(value), digits)}")


def main():
    print("# trigger-mode overlaps")
    show("sqrt(pi*gamma) peak [s^-1/2]", mp.sqrt(mp.pi * GAMMA))
    i10 = overlap(10 * NS)
    i40 = overlap(40 * NS)
    show("I(10 ns)", i10)
    show("I(40 ns)", i40)
    show("g2(10 ns) = 1 + I^2", 1 + i10 * i10)

    print("\n# adapted-mode two-photon weights")
    show("F+(I(10 ns))", f_plus(i10))
    show("F+(I(40 ns))", f_plus(i40))
    show("eta^2 * F+(I(40 ns))", ETA * ETA * f_plus(i40))
    show("eta^2 * F+ at dt=0 (exact 0.5776)", ETA * ETA * f_plus(mp.mpf(1)))
    show("eta^2 / 2 (infinite-delay limit)", ETA * ETA / 2)
    show("amplitude ratio (1+I)/(1-I) at 40 ns", (1 + i40) / (1 - i40))

    print("\n# fixed-mode distribution and loss")
    show("P2 at I = 0.91", fixed_p2(mp.mpf("0.91")))
    p2_40 = fixed_p2(i40)
    trip = lossy(0, 1 - p2_40, p2_40)
    show("lossy P0 (40 ns)", trip[0])
    show("lossy P1 (40 ns)", trip[1])
    show("lossy P2 (40 ns)", trip[2])
    trip0 = lossy(0, 0, 1)
    show("lossy P0 (dt = 0)", trip0[0])
    show("lossy P1 (dt = 0)", trip0[1])
    show("lossy P2 (dt = 0)", trip0[2])
    show("f2-mode lossy P2 (40 ns): eta^2*(1-F+)", ETA * ETA * (1 - f_plus(i40)))

    print("\n# small-delay expansion ratios at x = pi*gamma*dt = 0.05")
    x = mp.mpf("0.05")
    i_x = mp.e**-x * (1 + x)
    show("(1 - F+)/(x/2)^4", (1 - f_plus(i_x)) / (x / 2) ** 4)
    show("(1 - P2_fixed)/(x/sqrt(2))^2", (1 - fixed_p2(i_x)) / (x / mp.sqrt(2)) ** 2)
    # largest x keeping the quartic ratio within 5% of 1
    edge = mp.findroot(
        lambda t: (1 - f_plus(mp.e**-t * (1 + t))) / (t / 2) ** 4 - mp.mpf("0.95"),
        mp.mpf("0.04"),
    )
    show("x where quartic ratio hits 0.95", edge)

    print("\n# half-decay of the adapted-mode P2 (I = 1/sqrt(3))")
    x_half = mp.findroot(lambda t: mp.e**-t * (1 + t) - 1 / mp.sqrt(3), mp.mpf("1.4"))
    show("x* = pi*gamma*dt*", x_half)
    show("dt* [ns]", x_half / (mp.pi * GAMMA) / NS)

    print("\n# oscillator eigenfunction moments (vacuum variance 1/2)")
    # psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)); <x^2> = (2n+1)/2
    for n in (0, 1, 2):
        norm = mp.sqrt(2**n * mp.factorial(n) * mp.sqrt(mp.pi))
        moment = mp.quad(
            lambda v, n=n, norm=norm: v * v * (mp.hermite(n, v) * mp.e**(-v * v / 2) / norm) ** 2,
            [-mp.inf, 0, mp.inf],
        )
        show(f"<x^2> for n = {n}", moment)
        show(f"psi_{n}(0)^2", (mp.hermite(n, mp.mpf(0)) * 1 / norm) ** 2)


if __name__ == "__main__":
    main()
