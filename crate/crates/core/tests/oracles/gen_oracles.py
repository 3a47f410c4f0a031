"""High-precision reference values frozen into the Rust test-suite.

Run with `python3 gen_oracles.py`; requires mpmath. Every value is computed
straight from the defining formulas, independent of the Rust code paths.
"""
from mpmath import mp, mpf, log, exp, gamma, loggamma, binomial, quad, inf, nsum

mp.dps = 40


def jain_w(v, a, mu):
    if v == 0:
        return exp(-a)
    return a * (a + v * mu) ** (v - 1) * exp(-(a + v * mu)) / gamma(v + 1)


def bask_c(s, v, t, c):
    """p with shape slot s (= n/c), index v, generalization c."""
    return gamma(s + v) / (gamma(s) * gamma(v + 1)) * (c * t) ** v / (1 + c * t) ** (s + v)


print("jain_log_weight(v=3,a=2.5,mu=0.4) =", mp.nstr(log(2.5) + 2 * log(mpf("3.7")) - mpf("3.7") - log(6), 25))
print("jain_weight(v=2,a=0.5,mu=0.9)     =", mp.nstr(jain_w(2, mpf("0.5"), mpf("0.9")), 25))
print("baskakov_log(n=4,v=2,t=0.5)        =", mp.nstr(log(binomial(5, 2) * mpf("0.25") / mpf("1.5") ** 6), 25))

# c = 2, n = 10, r = 0, v = 2, m = 2: shape slot n/c = 5
val = quad(lambda t: bask_c(mpf(5), 2, t, 2) * t ** 2, [0, 1, 10, inf])
print("monomial_integral(10,0,2,2,c=2)    =", mp.nstr(val, 25))

# brute-force K(e^{-t}) at n=12, r=0, mu=0.2, x=1: 500 terms, quadrature per term
n, r, mu, x = 12, 0, mpf("0.2"), mpf(1)
mp.dps = 30
acc = mpf(0)
for v in range(500):
    w = jain_w(v, n * x, mu)
    if w < mpf("1e-40"):
        if v > 50:
            break
        continue
    integ = quad(lambda t: bask_c(mpf(n - r), v + r, t, 1) * exp(-t), [0, 1, 5, inf])
    acc += w * integ
print("K(e^-t; n=12,r=0,mu=0.2,x=1)       =", mp.nstr((n - r - 1) * acc, 25))

mp.dps = 40
# Lemma-2 second moment, n=20, r=0, mu=0.1, x=1
n, r, mu, x = 20, 0, mpf("0.1"), mpf(1)
k2 = (n**2 * x**2 / (1 - mu) ** 2 + (n / (1 - mu) ** 3 + n * (2 * r + 3) / (1 - mu)) * x + (r + 1) * (r + 2)) / ((n - r - 2) * (n - r - 3))
# independent route: series of generalized-Poisson weights with (v+r+1)(v+r+2)
ser = nsum(lambda v: jain_w(int(v), n * x, mu) * (v + r + 1) * (v + r + 2), [0, inf]) / ((n - r - 2) * (n - r - 3))
print("K2(n=20,r=0,mu=0.1,x=1) closed     =", mp.nstr(k2, 25), " series =", mp.nstr(ser, 25))

# Stancu f(t)=t, alpha=1, beta=2, n=10, r=0, mu=0, x=1.5 via direct series of Beta integrals
n, r, mu, x, al, be = 10, 0, mpf(0), mpf("1.5"), 1, 2
ser = mpf(0)
for v in range(400):
    w = jain_w(v, n * x, mu)
    # int p_{n-r,v+r}(t) (n t + al)/(n+be) dt
    i0 = mpf(1) / (n - r - 1)
    i1 = mpf(v + r + 1) / ((n - r - 1) * (n - r - 2))
    ser += w * (n * i1 + al * i0) / (n + be)
print("Stancu(t; a=1,b=2,n=10,x=1.5)      =", mp.nstr((n - r - 1) * ser, 25))
