"""Scratch: prototype characteristic directions + ring census."""
import math
from fractions import Fraction

import numpy as np

from phaseprint.polyfield import X, Y, parse_field
from phaseprint.flow import probe_ring, FATE_REACH, FATE_EXIT, FATE_BUDGET, FATE_ROTATES


# ---- univariate exact helpers (ascending coeff lists of Fractions) ----

def trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c

def deriv(c):
    return [c[k] * k for k in range(1, len(c))]

def divmod_exact(a, b):
    a = list(a); b = list(b)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and trim(r):
        k = len(r) - len(b)
        f = r[-1] / b[-1]
        q[k] = f
        for i, bc in enumerate(b):
            r[i + k] -= f * bc
        trim(r)
    return trim(q), r

def gcd_poly(a, b):
    a = trim(list(a)); b = trim(list(b))
    while b:
        _, r = divmod_exact(a, b)
        a, b = b, trim(r)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a

def square_free(c):
    c = trim(list(c))
    if len(c) <= 1:
        return c
    g = gcd_poly(c, deriv(c))
    if len(g) <= 1:
        return c
    q, r = divmod_exact(c, g)
    assert not r
    return q


def characteristic_directions(field, standard=True):
    dp = field.p.lowest_degree
    dq = field.q.lowest_degree
    lows = [d for d in (dp, dq) if d >= 0]
    m0 = min(lows)
    Pm = field.p.homogeneous_part(m0)
    Qm = field.q.homogeneous_part(m0)
    if standard:
        H = X * Qm - Y * Pm
    else:
        H = X * Pm - Y * Qm
    if H.is_zero():
        return None  # isotropic
    d = m0 + 1
    coeffs = [H.coefficient(d - k, k) for k in range(d + 1)]  # t^k coeff
    sf = square_free(coeffs)
    angles = []
    if coeffs[-1] == 0:  # y^d coefficient zero -> vertical direction
        # careful: coefficient of t^d is H.coefficient(0, d)
        angles.append(math.pi / 2)
    fl = np.array([float(c) for c in sf])
    if len(fl) > 1:
        roots = np.roots(fl[::-1])
        dfl = np.polyder(fl[::-1])
        for r in roots:
            if abs(r.imag) > 1e-7 * (1 + abs(r.real)):
                continue
            t = r.real
            for _ in range(60):
                val = np.polyval(fl[::-1], t)
                dv = np.polyval(dfl, t)
                if dv == 0:
                    break
                step = val / dv
                t -= step
                if abs(step) < 1e-15 * (1 + abs(t)):
                    break
            angles.append(math.atan(t) % math.pi)
    angles = sorted(set(round(a, 12) for a in angles))
    # merge near-duplicates
    out = []
    for a in angles:
        if not out or a - out[-1] > 1e-9:
            out.append(a)
    return sorted(out + [a + math.pi for a in out])


FATE_CHAR = {FATE_REACH: "R", FATE_EXIT: "X", FATE_BUDGET: "?", FATE_ROTATES: "O"}


def census(field_text, center=(0.0, 0.0), radius=0.1, n=180, standard=True):
    field = parse_field(field_text)
    cf = field.recenter((Fraction(center[0]).limit_denominator(10**6),
                         Fraction(center[1]).limit_denominator(10**6)))
    dirs = characteristic_directions(cf, standard)
    print(f"--- {field_text} at {center} r={radius}")
    if dirs is None:
        print("  isotropic (H == 0)")
        return
    print("  directions:", [round(d, 6) for d in dirs])
    if not dirs:
        print("  no real directions -> rotational")
        return
    offset = 0.0123456
    angles = (2 * math.pi * (np.arange(n) + 0.5) / n + offset) % (2 * math.pi)
    fates = probe_ring(
        field, center, angles, radius,
        reach_radius=radius / 50, exit_radius=4 * radius,
        max_arclength=20 * radius,
    )
    fwd = fates[0]; bwd = fates[1]
    def cls(f, b):
        if f == FATE_ROTATES or b == FATE_ROTATES:
            return "O"
        if f == FATE_BUDGET or b == FATE_BUDGET:
            return "?"
        if f == FATE_REACH and b == FATE_REACH:
            return "E"
        if f == FATE_EXIT and b == FATE_EXIT:
            return "H"
        return "P"
    cells = [cls(f, b) for f, b in zip(fwd, bwd)]
    print("  cells:", "".join(cells))
    return angles, cells, dirs


if __name__ == "__main__":
    census("x ; -y")                      # saddle: expect all H, 4 dirs
    census("y ; x^2")                     # cusp: expect H cells, dirs {0, pi}
    census("x ; 2*y")                     # node: expect all P
    census("x ; y")                       # star: isotropic
    census("y ; -x+2*y")                  # improper node: all P, dirs pi/4
    census("y ; x^4+x*y")                 # saddle-node (form 6)
    census("x^2 ; y")                     # classic saddle-node
    census("y ; -x^3+4*x*y")              # elliptic domain candidate
    census("x^2-y^2 ; 2*x*y")             # dipole: e=2
    census("y ; -x^5*(x^2-1)^2*(1+y*(1+x)^3)")  # degenerate spiral origin
    census("y ; -x*(x^2-1)^2", center=(1.0, 0.0))  # whorl cusp
    census("y ; -x*(x^2-1)^2")            # whorl center: no dirs
