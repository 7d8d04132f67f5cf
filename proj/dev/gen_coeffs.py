# Generates near-minimax polynomial coefficients for the vector math layer.
# Each poly is emitted as hex-exact double literals plus observed max abs error
# of the double-rounded coefficients against mpmath ground truth on a dense grid.
import mpmath as mp
mp.mp.dps = 60

def fit(f, a, b, deg, name, as_hex=True):
    # chebfit returns coefficients highest-first for polyval; we store lowest-first.
    poly, err = mp.chebyfit(f, [a, b], deg + 1, error=True)
    coeffs = [float(c) for c in reversed(poly)]
    # measure error of double-rounded coeffs
    worst = mp.mpf(0)
    N = 2000
    for i in range(N + 1):
        x = mp.mpf(a) + (mp.mpf(b) - mp.mpf(a)) * i / N
        acc = mp.mpf(0)
        for c in reversed(coeffs):
            acc = acc * x + c
        e = abs(acc - f(x))
        if e > worst: worst = e
    print(f"// {name}: degree {deg} on [{a}, {b}], max abs err {mp.nstr(worst, 3)}")
    for i, c in enumerate(coeffs):
        print(f"  {c.hex()},  // c{i} = {c!r}")
    print()
    return coeffs

z2max = float(( (mp.sqrt(2)-1)/(mp.sqrt(2)+1) )**2)
print("z2max =", z2max)

# log2(m) = z * P(z^2), z = (m-1)/(m+1), m in [sqrt(1/2), sqrt(2))
def plog(w):
    if w == 0: return 2/mp.log(2)
    z = mp.sqrt(w)
    return mp.log((1+z)/(1-z), 2)/z
fit(plog, 0.0, z2max*1.0000001, 7, "log2 core: P(z^2) with log2(m)=z*P(z^2)")

# 2^f on [-0.5, 0.5]
fit(lambda f: mp.mpf(2)**f, -0.5, 0.5, 13, "exp2 core: Q(f)=2^f")

# sin(2 pi r) = r * S(r^2), r in [-1/8, 1/8] -> w in [0, 1/64]
def psin(w):
    if w == 0: return 2*mp.pi
    r = mp.sqrt(w)
    return mp.sin(2*mp.pi*r)/r
fit(psin, 0.0, 1.0/64 * 1.0000001, 7, "sin2pi core: S(r^2) with sin(2pi r)=r*S(r^2)")

# cos(2 pi r) = C(r^2)
fit(lambda w: mp.cos(2*mp.pi*mp.sqrt(w)), 0.0, 1.0/64 * 1.0000001, 9, "cos2pi core: C(r^2)")
