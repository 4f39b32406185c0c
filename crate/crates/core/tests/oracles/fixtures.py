"""Independent model of the shipped corpus interpretations.

Recomputes, with exact fractions and no reference to the Rust code, the
instance counts and verdicts of each extracted sentence on its grid, the
first failing assignment once every witness is decremented, and the moduli
found by brute-force search. The printed values are frozen in
tests/oracle_values.rs.
"""
from fractions import Fraction as F
from itertools import product

REAL = [F(i, 16) for i in range(17)]
NAT = range(9)


def lt(a, b, n):
    # |a - b| < 1/n, with 1/0 read as infinity
    return n == 0 or abs(a - b) < F(1, n)


def pred(n):
    return max(n - 1, 0)


def run(name, binders, holds):
    total = failed = 0
    first = None
    for xs in product(*[d for _, d in binders]):
        total += 1
        if not holds(*xs):
            failed += 1
            if first is None:
                first = ", ".join(f"{n}={v}" for (n, _), v in zip(binders, xs))
    return total, failed, first


def report(name, binders, sentence, witness):
    good = run(name, binders, lambda *xs: sentence(witness, *xs))
    bad = run(name, binders, lambda *xs: sentence(lambda *a: pred_all(witness(*a)), *xs))
    print(f"{name}: instances={good[0]} failed={good[1]}; decremented: failed={bad[1]} first=[{bad[2]}]")


def pred_all(w):
    return tuple(pred(v) for v in w) if isinstance(w, tuple) else pred(w)


# continuity: f = 1 - x, N = n1
f = lambda x: 1 - x
report(
    "continuity",
    [("x", REAL), ("n1", NAT), ("y", REAL)],
    lambda w, x, n1, y: (not lt(x, y, w(x, n1))) or lt(f(x), f(y), n1),
    lambda x, n1: n1,
)

# uniform continuity: f = x^2, N = 2 n1
g = lambda x: x * x
report(
    "uniform-continuity",
    [("n1", NAT), ("x", REAL), ("y", REAL)],
    lambda w, n1, x, y: (not lt(x, y, w(n1))) or lt(g(x), g(y), n1),
    lambda n1: 2 * n1,
)

# convergence: xs N = 1/(N+1), limit 0, m = n
report(
    "convergence",
    [("n", NAT), ("N", NAT)],
    lambda w, n, N: (not w(n) <= N) or lt(F(1, N + 1), 0, n),
    lambda n: n,
)

# probability: P a = (a+1)/16 over 8 nested events, s = 8 n1
P = lambda a: F(a + 1, 16)
EV = range(8)
report(
    "probability",
    [("A", EV), ("B", EV), ("n1", NAT)],
    lambda w, A, B, n1: (not lt(P(A), 0, w(A, B, n1))) or lt(P(B), 0, n1),
    lambda A, B, n1: 8 * n1,
)

# bayes: Pc(A, B) = P(A and B)/P(B) with nested events, s = n1 n2
Pc = lambda a, b: F(min(a, b) + 1, 16) / P(b)
report(
    "bayes",
    [("n1", NAT), ("n2", NAT), ("A", EV), ("B", EV)],
    lambda w, n1, n2, A, B: (not (lt(P(A), 0, w(n1, n2)) and not lt(P(B), 0, n1)))
    or lt(Pc(A, B), 0, n2),
    lambda n1, n2: n1 * n2,
)

# riemann: f = x on the 1/16 grid; partitions p = 2d + side, d = 0..4
mesh = lambda p: F(1, 2 ** (p // 2))
side = lambda p: -1 if p % 2 == 0 else 1
rsum = lambda p: F(1, 2) + side(p) * F(1, 2 ** (p // 2 + 1))
ZETA = [
    ("n", lambda n: n),
    ("2n", lambda n: 2 * n),
    ("n+1", lambda n: n + 1),
    ("0", lambda n: 0),
    ("odd", lambda n: n if n % 2 else 0),
]
PART = range(10)


def rie(w, zi, n4):
    zeta = ZETA[zi][1]
    n2, n3, n1 = w(zeta, n4)
    prem = all((not lt(x, y, zeta(n1))) or lt(x, y, n1) for x in REAL for y in REAL)
    concl = all(
        (not (lt(mesh(p), 0, n2) and lt(mesh(q), 0, n3))) or lt(rsum(p), rsum(q), n4)
        for p in PART
        for q in PART
    )
    return (not prem) or concl


report(
    "riemann",
    [("zeta", range(len(ZETA))), ("n4", NAT)],
    rie,
    lambda zeta, n4: (zeta(n4), zeta(n4), n4),
)

# mct: c numerators over 8, bounded mu with bound 32
monus = lambda a, b: max(a - b, 0)


def bmu(fn, bound=32):
    for n in range(bound + 1):
        if fn(n) == 0:
            return n
    return 0


CS = [
    ("0", lambda n: 0),
    ("8", lambda n: 8),
    ("min n 8", lambda n: monus(8, monus(8, n))),
    ("min 2n 8", lambda n: monus(8, monus(8, 2 * n))),
    ("late", lambda n: monus(8, monus(12, n))),
    ("parity", lambda n: n % 2),
    ("n", lambda n: n),
]


def mct_t(c):
    return max(bmu(lambda n: monus(v, c(n))) for v in range(9))


def mct(w, ci, k):
    c = CS[ci][1]
    m, m1 = w(c, k)
    mono = all(c(n) <= c(n + 1) and c(n + 1) <= 8 for n in NAT)
    close = all(
        (not m <= N) or ((not m1 <= M) or (k == 0 or F(abs(c(M) - c(N)), 8) < F(1, k)))
        for N in NAT
        for M in NAT
    )
    return (not mono) or close


report(
    "mct-mu",
    [("c", range(len(CS))), ("k", NAT)],
    mct,
    lambda c, k: (mct_t(c), mct_t(c)),
)
print("mct-mu t(c):", [mct_t(c) for _, c in CS])


# brute-force moduli: least N >= 1 with |x-y| < 1/N -> |f x - f y| < 1/k
def modulus(fn, k, grid=REAL, limit=64):
    for N in range(1, limit + 1):
        if all((not lt(x, y, N)) or lt(fn(x), fn(y), k) for x in grid for y in grid):
            return N
    return None


for k in range(1, 9):
    print(f"modulus x^2 k={k}: {modulus(g, k)}", end="; ")
print()
for k in range(1, 9):
    print(f"modulus 1-x k={k}: {modulus(f, k)}", end="; ")
print()

# bounded mu against first-zero test functions
def first_zero(j):
    return lambda n: monus(j, n) and 1 if n < j else 0


viol = [j for j in range(0, 34) if (lambda fz: fz(bmu(fz)) != 0)(first_zero(j))]
print("mu bound 32 violations among first zero at 0..33:", viol)
