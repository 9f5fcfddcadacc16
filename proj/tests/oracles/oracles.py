"""Reference values frozen into the C++ tests, computed in high precision."""
from fractions import Fraction
import mpmath as mp

mp.mp.dps = 40


def bump(x):
    return mp.exp(-1 / (1 - x * x)) if abs(x) < 1 else mp.mpf(0)


raw = mp.quad(bump, [-1, 0, 1])
c = 1 / raw
print("raw_mass", raw)
print("c", c)
print("s(0)", c * mp.e ** -1)

# 1/4 quantile of s_1
cdf = lambda t: c * mp.quad(bump, [-1, t])
q = mp.findroot(lambda t: cdf(t) - mp.mpf(1) / 4, -0.3)
print("quantile_0.25", q)

# derivatives of s at a few points
for x in ("0.3", "-0.7"):
    x = mp.mpf(x)
    print("s'(%s)" % x, c * mp.diff(bump, x, 1), "s''", c * mp.diff(bump, x, 2), "s'''", c * mp.diff(bump, x, 3))

# even moments int y^{2k} s(y) dy
for k in range(1, 4):
    print("moment", 2 * k, c * mp.quad(lambda y: y ** (2 * k) * bump(y), [-1, 0, 1]))

# int s(y) log|z - y| dy
for z in ("0", "0.5", "1", "2", "10"):
    z = mp.mpf(z)
    pts = [-1, z, 1] if abs(z) < 1 else [-1, 1]
    print("logmoment z=%s" % z, c * mp.quad(lambda y: bump(y) * mp.log(abs(z - y)), pts))


# continued fractions by brute force best approximation
def best_denominators(alpha, qmax):
    out, best = [], mp.inf
    for qq in range(1, qmax + 1):
        d = abs(qq * alpha - mp.nint(qq * alpha))
        if d < best:
            best = d
            out.append(qq)
    return out


golden = (mp.sqrt(5) - 1) / 2
print("golden best denominators", best_denominators(golden, 13))
print("1/pi best denominators", best_denominators(1 / mp.pi, 400))
x, a = 1 / mp.pi, []
for _ in range(5):
    x = 1 / x
    a.append(int(mp.floor(x)))
    x -= mp.floor(x)
print("1/pi partial quotients", a)

n8 = abs(8 * golden - 5)
print("||8 alpha||", n8, "13||8a||", 13 * n8, "tall+short", 13 * n8 + 8 * abs(13 * golden - 8))
print("orbit golden", [mp.frac(j * golden) for j in range(3)])
print("3cos window", [3 * mp.cos(2 * mp.pi * mp.frac(j * golden)) for j in range(3)])
print("log((3+sqrt5)/2)", mp.log((3 + mp.sqrt(5)) / 2))
print("log((10+sqrt96)/2)", mp.log((10 + mp.sqrt(96)) / 2))
print("free N=5", [2 * mp.cos(k * mp.pi / 6) for k in range(5, 0, -1)])
