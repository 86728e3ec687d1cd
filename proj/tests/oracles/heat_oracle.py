"""Independent oracle for the d=1 heat covariance.

E u(t)u(s) = H0(2H0-1) H1(2H1-1) q_{2H1-1} * 2^{1-H1} Gamma(1-H1)
             * int_0^t int_0^s |u-v|^{2H0-2} (t+s-u-v)^{H1-1} dv du

The double integral is done with mpmath in the original (u, v) coordinates.
The |u-v| singularity is removed by v = u -/+ y^{1/(a+1)}.
"""
import mpmath as mp

mp.mp.dps = 15


def q_alpha(a):
    return 1 / (2 ** (1 - a) * mp.sqrt(mp.pi)) * mp.gamma(a / 2) / mp.gamma((1 - a) / 2)


def time_integral(H0, H1, t, s):
    a = mp.mpf(2 * H0 - 2)
    b = mp.mpf(H1 - 1)
    p = 1 / (a + 1)

    def h(u, v):
        z = t + s - u - v
        return z ** b if z > 0 else mp.mpf(0)

    def outer(u):
        total = mp.mpf(0)
        if u <= s:  # v in [0, u]
            total += p * mp.quad(lambda y: h(u, u - y ** p), [0, u ** (a + 1)])
        else:  # v in [0, s], v < u
            total += p * mp.quad(lambda y: h(u, u - y ** p), [(u - s) ** (a + 1), u ** (a + 1)])
        if s > u:  # v in [u, s]
            total += p * mp.quad(lambda y: h(u, u + y ** p), [0, (s - u) ** (a + 1)])
        return total

    return mp.quad(outer, sorted(set([0, min(t, s), t])))


def heat_cov(H0, H1, t, s):
    pref = H0 * (2 * H0 - 1) * H1 * (2 * H1 - 1) * q_alpha(2 * H1 - 1) * 2 ** (1 - H1) * mp.gamma(1 - H1)
    return pref * time_integral(H0, H1, t, s)


if __name__ == "__main__":
    for H in (0.51, 0.55, 0.65, 0.7, 0.75):
        print("t=s=1 H0=H1=%.2f" % H, mp.nstr(heat_cov(H, H, 1, 1), 12))
    print("H0=0.7 H1=0.6 t=1 s=0.5", mp.nstr(heat_cov(0.7, 0.6, 1, 0.5), 12))
    print("H0=0.7 H1=0.6 t=0.5 s=1", mp.nstr(heat_cov(0.7, 0.6, 0.5, 1), 12))
    print("1/sqrt(pi)", mp.nstr(1 / mp.sqrt(mp.pi), 12))
