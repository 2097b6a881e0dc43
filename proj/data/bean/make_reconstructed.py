#!/usr/bin/env python3
"""Regenerates the reconstructed magnetometry curves in this directory.

The measured SQUID records are not published. These curves are rebuilt from the numbers
quoted with them: T_c = 9.26 K, the H_pen(T) fit (122 mT, 9.26 K, gamma 2.13),
0.16 emu for the Nb cylinder and 0.89 emu for the YBCO ring at 4 K and zero field,
H_pen = 0.9 T for YBCO at 4.6 K, and a pinning-force maximum near 100 mT below 4 K.
Field steps are 1 mT (Nb) and 10 mT (YBCO), which sets the resolution of H_pen.
"""
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))

NB_TC = 9.26
NB_HPEN0 = 0.122  # T
NB_GAMMA = 2.13
NB_A = 0.835e-3
NB_V = 2.28e-9
NB_M4K = 0.16e-3  # A m^2 at 4 K, 0 T

YBCO_A = 0.596e-3
YBCO_B = 2.124e-3
YBCO_V = 2.63e-9
YBCO_M4K = 0.89e-3
YBCO_TC = 93.0


def nb_hpen(t):
    return max(0.0, NB_HPEN0 * (1.0 - (t / NB_TC) ** NB_GAMMA))


def virgin_shape(h, hpen):
    if h <= hpen:
        u = h / hpen
        return 2.0 * u - u * u
    return 0.3 + 0.7 * math.exp(-(h - hpen) / hpen)


def write(name, kind, fixed, unit, rows):
    path = os.path.join(HERE, name)
    with open(path, "w") as f:
        f.write("# reconstructed, not measured; see README.md\n")
        f.write(f"# kind = {kind}\n# fixed = {fixed}\n")
        f.write(f"# moment_unit = emu\n# abscissa_unit = {unit}\n")
        f.write("x,moment" + (",branch\n" if len(rows[0]) == 3 else "\n"))
        for r in rows:
            f.write(",".join(r if isinstance(r, list) else [f"{v:.6g}" if not isinstance(v, str) else v for v in r]) + "\n")


def loop(hmax_mt, step_mt, hpen, m_irr, m_rev):
    """Virgin branch, then decreasing to -hmax, then increasing back. Moments in A m^2."""
    n = int(round(hmax_mt / step_mt))
    rows = []
    peak = m_irr(hpen) + abs(m_rev(hpen))
    for i in range(n + 1):
        h = i * step_mt * 1e-3
        rows.append((i * step_mt, -peak * virgin_shape(h, hpen) * 1e3, "v"))
    for i in range(n, -n - 1, -1):
        h = i * step_mt * 1e-3
        rows.append((i * step_mt, (math.copysign(m_irr(abs(h)), h if h != 0 else 1.0) + m_rev(h)) * 1e3, "d"))
    for i in range(-n + 1, n + 1):
        h = i * step_mt * 1e-3
        rows.append((i * step_mt, (-math.copysign(m_irr(abs(h)), h if h != 0 else 1.0) + m_rev(h)) * 1e3, "i"))
    return rows


def main():
    # M-T at 0.5 mT on warming, full shielding below T_c.
    m0 = NB_V * 0.5e-3 / (4e-7 * math.pi)
    rows = []
    for i in range(101):
        t = 2.0 + 0.1 * i
        m = -m0 * (1.0 - (t / NB_TC) ** 4) if t < NB_TC else 0.0
        rows.append((round(t, 3), m * 1e3))
    write("nb_mt.csv", "MT", "0.5 mT", "K", rows)

    # Nb M-H loops. J_c(T, B) = J0 (1 - t^2) exp(-B / B0(T)), B0(4 K) = 100 mT.
    jc4 = 3.0 * (NB_M4K / NB_V) / NB_A
    for t in (2.0, 3.0, 4.0, 4.6, 5.0, 6.0, 7.0, 8.0, 9.0):
        s = (1.0 - (t / NB_TC) ** 2) / (1.0 - (4.0 / NB_TC) ** 2)
        b0 = 0.1 * s
        hpen = nb_hpen(t)

        def m_irr(b, s=s, b0=b0):
            return jc4 * s * math.exp(-b / b0) * NB_A * NB_V / 3.0

        def m_rev(b, hpen=hpen, s=s):
            return -0.4 * NB_M4K * s * (b / hpen) * math.exp(1.0 - abs(b) / hpen)

        write(f"nb_mh_{t:g}K.csv", "MH", f"{t:g} K", "mT", loop(300, 1, hpen, m_irr, m_rev))

    # YBCO ring loops at 4 K and 4.6 K; strong pinning, H_pen(4.6 K) = 0.9 T.
    jcy = 4.0 * (YBCO_M4K / YBCO_V) / (YBCO_A * (1.0 - YBCO_A / (3.0 * YBCO_B)))
    for t, hpen in ((4.0, 0.91), (4.6, 0.9)):
        s = (1.0 - (t / YBCO_TC) ** 2) / (1.0 - (4.0 / YBCO_TC) ** 2)

        def m_irr(b, s=s):
            return jcy * s / (1.0 + b / 2.0) * YBCO_A * (1.0 - YBCO_A / (3.0 * YBCO_B)) * YBCO_V / 4.0

        def m_rev(b):
            return 0.0

        write(f"ybco_mh_{t:g}K.csv", "MH", f"{t:g} K", "mT", loop(2000, 10, hpen, m_irr, m_rev))


if __name__ == "__main__":
    main()
