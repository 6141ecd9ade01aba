#!/usr/bin/env python3
"""Regenerate the bundled IEEE test cases under data/.

Line parameters come from the standard published tables. Series impedance
r + jx per branch is converted to g = r/(r^2+x^2) and b_tilde = x/(r^2+x^2);
purely reactive branches (r = 0) get g = 0 exactly. The 33-bus feeder table
is in ohms and is normalized by Z_base = (12.66 kV)^2 / 100 MVA first.
"""

import os

# IEEE 14-bus, per-unit branch series impedances (r, x)
IEEE14 = [
    (1, 2, 0.01938, 0.05917),
    (1, 5, 0.05403, 0.22304),
    (2, 3, 0.04699, 0.19797),
    (2, 4, 0.05811, 0.17632),
    (2, 5, 0.05695, 0.17388),
    (3, 4, 0.06701, 0.17103),
    (4, 5, 0.01335, 0.04211),
    (4, 7, 0.0, 0.20912),
    (4, 9, 0.0, 0.55618),
    (5, 6, 0.0, 0.25202),
    (6, 11, 0.09498, 0.19890),
    (6, 12, 0.12291, 0.25581),
    (6, 13, 0.06615, 0.13027),
    (7, 8, 0.0, 0.17615),
    (7, 9, 0.0, 0.11001),
    (9, 10, 0.03181, 0.08450),
    (9, 14, 0.12711, 0.27038),
    (10, 11, 0.08205, 0.19207),
    (12, 13, 0.22092, 0.19988),
    (13, 14, 0.17093, 0.34802),
]

# 33-bus radial feeder (Baran & Wu), branch R, X in ohms
IEEE33_OHM = [
    (1, 2, 0.0922, 0.0470),
    (2, 3, 0.4930, 0.2511),
    (3, 4, 0.3660, 0.1864),
    (4, 5, 0.3811, 0.1941),
    (5, 6, 0.8190, 0.7070),
    (6, 7, 0.1872, 0.6188),
    (7, 8, 0.7114, 0.2351),
    (8, 9, 1.0300, 0.7400),
    (9, 10, 1.0440, 0.7400),
    (10, 11, 0.1966, 0.0650),
    (11, 12, 0.3744, 0.1238),
    (12, 13, 1.4680, 1.1550),
    (13, 14, 0.5416, 0.7129),
    (14, 15, 0.5910, 0.5260),
    (15, 16, 0.7463, 0.5450),
    (16, 17, 1.2890, 1.7210),
    (17, 18, 0.7320, 0.5740),
    (2, 19, 0.1640, 0.1565),
    (19, 20, 1.5042, 1.3554),
    (20, 21, 0.4095, 0.4784),
    (21, 22, 0.7089, 0.9373),
    (3, 23, 0.4512, 0.3083),
    (23, 24, 0.8980, 0.7091),
    (24, 25, 0.8960, 0.7011),
    (6, 26, 0.2030, 0.1034),
    (26, 27, 0.2842, 0.1447),
    (27, 28, 1.0590, 0.9337),
    (28, 29, 0.8042, 0.7006),
    (29, 30, 0.5075, 0.2585),
    (30, 31, 0.9744, 0.9630),
    (31, 32, 0.3105, 0.3619),
    (32, 33, 0.3410, 0.5302),
]

Z_BASE_33 = 12.66**2 / 100.0  # kV^2 / MVA = ohm


def admittances(branches, z_base=1.0):
    out = []
    for f, t, r, x in branches:
        r, x = r / z_base, x / z_base
        den = r * r + x * x
        g = r / den if r > 0.0 else 0.0
        out.append((f, t, g, x / den))
    return out


def write_case(path, m, lines):
    with open(path, "w") as fh:
        fh.write(f"# buses: {m}\n")
        fh.write("from_bus,to_bus,g_line,b_tilde_line\n")
        for f, t, g, b in lines:
            fh.write(f"{f},{t},{g!r},{b!r}\n")
    print(f"wrote {path} ({m} buses, {len(lines)} lines)")


def main():
    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
    os.makedirs(root, exist_ok=True)
    write_case(os.path.join(root, "ieee14.csv"), 14, admittances(IEEE14))
    write_case(os.path.join(root, "ieee33.csv"), 33, admittances(IEEE33_OHM, Z_BASE_33))


if __name__ == "__main__":
    main()
