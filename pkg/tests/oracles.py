"""Independent oracle implementations used to derive and guard expected values.

Everything here deliberately avoids the package's own evaluation paths:
plain series, bracketing root finders, integral representations, residue
sums in high-precision arithmetic, and textbook closed forms.
"""

import math

import mpmath as mp


def lower_gamma_series_q(u, x, tol=1e-16):
    """Q(u, x) = 1 - x^u e^{-x} sum_k x^k / (u (u+1) ... (u+k))."""
    if x == 0:
        return 1.0
    term = 1.0 / u
    acc = term
    k = 0
    while True:
        k += 1
        term *= x / (u + k)
        acc += term
        if term < tol * acc:
            break
    return 1.0 - math.exp(-x + u * math.log(x) - math.lgamma(u)) * acc


def inverse_q_bisect_newton(u, p):
    """Invert Q(u, .) = p by bracketing bisection plus Newton polish."""
    lo, hi = 0.0, 1.0
    while lower_gamma_series_q(u, hi) > p:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if lower_gamma_series_q(u, mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(6):
        f = lower_gamma_series_q(u, x) - p
        fp = -math.exp((u - 1.0) * math.log(x) - x - math.lgamma(u))
        x -= f / fp
    return x


def bessel_i_series(nu, x, terms=120):
    acc = 0.0
    for k in range(terms):
        acc += math.exp((nu + 2 * k) * math.log(x / 2.0)
                        - math.lgamma(k + 1) - math.lgamma(nu + k + 1))
    return acc


def bessel_k_integral(nu, x):
    """K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt (adaptive quadrature;
    the integrand is below double-precision underflow past cosh t ~ 750/x)."""
    from scipy import integrate
    t_max = math.acosh(745.0 / x) if x < 700 else 1.0
    val, _ = integrate.quad(lambda t: math.exp(-x * math.cosh(t)) * math.cosh(nu * t),
                            0.0, t_max, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def marcum_series_mp(u, a, b, dps=30):
    """Canonical Marcum series in high-precision arithmetic."""
    with mp.workdps(dps):
        xx, y = mp.mpf(a) ** 2 / 2, mp.mpf(b) ** 2 / 2
        acc = mp.mpf(0)
        j = 0
        while True:
            w = mp.e ** (-xx) * xx ** j / mp.factorial(j)
            acc += w * mp.gammainc(u + j, y, mp.inf, regularized=True)
            if j > 2 * xx + 20 and w < mp.mpf(10) ** (-dps - 5):
                break
            j += 1
        return float(acc)


def kernel_residue_series(N, x, kmax=60, dps=40):
    """K_N(x) by summing residues of Gamma(1+s)^N x^{-s} at s = -1-k.

    Order-N poles: the residue is the (N-1)th Taylor coefficient of
    ((1+s+k) Gamma(1+s))^N x^{-s} around s = -1-k, which carries the
    log(x) terms automatically.
    """
    with mp.workdps(dps):
        xm = mp.mpf(x)
        total = mp.mpf(0)
        for k in range(kmax):
            s0 = mp.mpf(-1 - k)

            def g(eps, s0=s0, k=k):
                s = s0 + eps
                num = mp.gamma(2 + s + k)
                den = mp.mpf(1)
                for j in range(k):
                    den *= (1 + s + j)
                return (num / den) ** N * xm ** (-s)

            coeff = mp.taylor(g, 0, N - 1)[N - 1]
            total += coeff
            if k > 5 and abs(coeff) < mp.mpf(10) ** (-35) * abs(total):
                break
        return float(total)


def rayleigh_avg_pd(u, lam, gbar):
    """Classic closed form for the Rayleigh (N=1) fading average, integer u."""
    assert float(u).is_integer() and u >= 1
    u = int(u)
    head = sum(math.exp(-lam / 2 + k * math.log(lam / 2) - math.lgamma(k + 1))
               for k in range(u - 1))
    ratio = ((1.0 + gbar) / gbar) ** (u - 1)
    z = lam * gbar / (2.0 * (1.0 + gbar))
    tail = sum(math.exp(-lam / 2 + k * math.log(z) - math.lgamma(k + 1))
               for k in range(u - 1))
    return head + ratio * (math.exp(-lam / (2.0 * (1.0 + gbar))) - tail)


def avg_pd_reference_quad(u, pf, gbar, N, tol=1e-11):
    """Fading-average oracle: scipy adaptive quadrature over an mpmath kernel."""
    from scipy import integrate
    from scipy.special import gammainccinv, chndtr

    lam = 2.0 * float(gammainccinv(u, pf))

    def f(v):
        x = math.exp(v)
        q = 1.0 - chndtr(lam, 2.0 * u, 2.0 * gbar * x)
        return q * float(mp.meijerg([[], []], [[1] * N, []], x))

    hi = N * math.log(60.0 / N) + 3.0
    val, _ = integrate.quad(f, -60.0, hi, epsabs=tol, epsrel=tol, limit=400)
    return val


def kolmogorov_critical(n, alpha=0.05):
    """Asymptotic KS critical value c(alpha)/sqrt(n)."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c / math.sqrt(n)
