"""Reference values for the unit tests, computed at 50 digits with mpmath.

Run with `python3 derive_oracles.py`; the printed numbers are pasted into
test_bounds.cpp, test_normal.cpp and test_policies.cpp.
"""
from mpmath import mp, mpf, ncdf, erfinv, sqrt, log, exp, ceil, pi, e

mp.dps = 50


def phi(x):
    return ncdf(x)


def phi_inv(p):
    # 2p - 1 needs enough digits to keep tiny p away from -1.
    with mp.workdps(400):
        return +(sqrt(2) * erfinv(2 * mpf(p) - 1))


def show(name, value):
    print(f"{name} = {mp.nstr(value, 20)}")


print("# normal")
for x in ["-8", "-3", "-1.5", "0", "0.25", "2", "6"]:
    show(f"cdf({x})", phi(mpf(x)))
for p in ["1e-300", "1e-10", "0.001", "0.02425", "0.3", "0.5", "0.6914624612740131", "0.975", "0.999999999999"]:
    # Evaluate at the double nearest to p, which is what the C++ side sees.
    show(f"quantile({p})", phi_inv(mpf(float(p))))

print("# median tail, n=100 s=0.1 a=0.2 standard normal")
p1 = mpf("0.4") - phi(phi_inv(mpf("0.4")) - mpf("0.2"))
show("p1", p1)
show("lower", exp(-200 * p1**2))

print("# quantile tail, n=200 s=0.2 p=0.5 a=b=0.3")
s = mpf("0.2")
p1 = mpf("0.5") - s - phi(phi_inv(mpf("0.5") - s) - mpf("0.3"))
p2 = phi(phi_inv(mpf("0.5") + s) + mpf("0.3")) - mpf("0.5") - s
show("lower", exp(-400 * p1**2))
show("upper", exp(-400 * p2**2))

print("# attacked-fraction sample size")
for k, eps, delta in [(10, "0.0665", "0.05"), (5, "0.1", "0.1")]:
    eps = mpf(eps)
    delta = mpf(delta)
    tech = ceil(log(k / (2 * eps**2 * delta)) / (2 * eps**2)) + 1
    proof = ceil(log(k / (eps**2 * delta)) / (2 * eps**2)) + 1
    print(f"K={k} eps0={eps} delta={delta}: technical N={tech} proof N={proof}")

print("# gaussian constants, D=2 sigma=1 rho=0.125")
dmin, sigma, rho = mpf(2), mpf(1), mpf("0.125")
thr = phi(dmin / (4 * sigma)) - mpf("0.5")
l = exp(-(dmin + 4) ** 2 / (32 * sigma**2)) / sqrt(2 * pi * sigma**2)
omega = 2 / l**2
b = max(omega, 2 / (thr - rho) ** 2)
spread = phi(dmin / (2 * sigma)) - phi(dmin / (4 * sigma))
c_min = max(10, 1 / spread**2, 1 / (thr - rho) ** 2)
show("threshold", thr)
show("l", l)
show("omega_min", omega)
show("b_min", b)
show("c_min", c_min)
show("3.5/l^2", mpf("3.5") / l**2)

print("# paper-k10 arms N(2i, 1), rho=0.125, s=threshold")
means = [2 * i for i in range(1, 11)]
mu_star = max(means)
x0 = mu_star - dmin / 2
terms = [mpf(20)]
for m in means[:-1]:
    terms.append(2 / (phi(x0 - m) - mpf("0.5") - thr) ** 2)
terms.append(2 / (mpf("0.5") - thr - phi(x0 - mu_star)) ** 2)
terms.append(2 / (thr - rho) ** 2)
c3 = max(terms)
show("theorem3 c threshold", c3)
terms4 = [mpf(40)]
for m in means[:-1]:
    terms4.append(4 / (phi(x0 - m) - mpf("0.5") - thr) ** 2)
terms4.append(4 / (mpf("0.5") - thr - phi(x0 - mu_star)) ** 2)
terms4.append(1 / (thr - rho) ** 2)
show("theorem4 c threshold", max(terms4))

T = mpf(100000)
q_best = mu_star + phi_inv(mpf("0.5") - thr)


def gap(m):
    return q_best - (m + phi_inv(mpf("0.5") + thr))


th1 = sum((mu_star - m) * (b * log(2 * T) + 4 * omega * log(T) / gap(m) ** 2 + 2 + 2 * pi**2 / 3) for m in means[:-1])
show("theorem1 bound T=1e5 (b_min, omega_min)", th1)
delta = mpf("0.05")
K = 10
const = e * (b * K / (2 * delta)) ** mpf("0.25") + 2 * K / delta + 3 + pi**2 / 3
th2 = sum((mu_star - m) * (b * log(2 * T) + 4 * omega * log(T) / gap(m) ** 2 + const) for m in means[:-1])
show("theorem2 bound T=1e5 delta=0.05 (b_min, omega_min)", th2)
c = mpf(10)
th3 = c * sum(mu_star - m for m in means[:-1]) * log(T) + 2 * c * K * e * mu_star + sum((2 + 3 * c) * (mu_star - m) for m in means[:-1])
show("theorem3 bound T=1e5 c=10", th3)
th4 = 6 * ceil(c) ** 2 * K**3 * mu_star / delta + sum(2 * c * (mu_star - m) * (log(T) + 1) for m in means[:-1])
show("theorem4 bound T=1e5 c=10 delta=0.05", th4)

print("# exp3 gamma, K=10 T=1e5")
show("gamma", min(1, sqrt(K * log(K) / ((e - 1) * T))))

print("# med-e-ucb schedule, b=4 G=1000")
bb = mpf(4)
G = 1000
print("m0 =", ceil(bb * log(G)))
print("d_k =", [int(ceil(bb * log((k + 1) * G)) - ceil(bb * log(k * G))) for k in range(1, 12)])
