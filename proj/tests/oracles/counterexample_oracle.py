"""Independent high-precision oracle for the cap-family counterexample.

Computes, with mpmath tanh-sinh quadrature on the raw radial integrals (not the
rescaled form used by the library):

  top(N)  = 2*pi * int_0^R r * (r/2) dr,                R = N^(-1/(2-e))
  side(N) = 2*pi * int_0^R r * sqrt((2-e)^2 r^(2-2e) + r^2/4) dr
  F(1/N)  = N^(3/(2-e)) / (2*pi) * side(N)

and the least-squares slope of log F against log N over N = 1e2..1e6.
Run: python3 counterexample_oracle.py
"""
import mpmath as mp

mp.mp.dps = 40


def side(e, N):
    R = mp.mpf(N) ** (-1 / (2 - mp.mpf(e)))
    f = lambda r: r * mp.sqrt((2 - e) ** 2 * r ** (2 - 2 * e) + r ** 2 / 4)
    return 2 * mp.pi * mp.quad(f, [0, R])


def top(e, N):
    R = mp.mpf(N) ** (-1 / (2 - mp.mpf(e)))
    return 2 * mp.pi * mp.quad(lambda r: r * r / 2, [0, R])


def F(e, N):
    return mp.mpf(N) ** (3 / (2 - mp.mpf(e))) / (2 * mp.pi) * side(e, N)


if __name__ == "__main__":
    for e in [0, 0.25, 0.5, 0.75]:
        e = mp.mpf(e)
        for N in [10, 100, 1000, 10000, 100000, 1000000]:
            print(f"eps={float(e)} N={N} F={mp.nstr(F(e, N), 17)} "
                  f"top={mp.nstr(top(e, N), 17)} side={mp.nstr(side(e, N), 17)} "
                  f"ratio={mp.nstr(side(e, N) / top(e, N), 17)}")
        Ns = [10 ** k for k in range(2, 7)]
        xs = [mp.log(n) for n in Ns]
        ys = [mp.log(F(e, n)) for n in Ns]
        xm = sum(xs) / len(xs)
        ym = sum(ys) / len(ys)
        slope = sum((a - xm) * (b - ym) for a, b in zip(xs, ys)) / sum((a - xm) ** 2 for a in xs)
        target = e / (2 - e)
        print(f"eps={float(e)} slope={mp.nstr(slope, 12)} target={mp.nstr(target, 12)} "
              f"relerr={mp.nstr(abs(slope - target) / target, 6) if e > 0 else 'n/a'}")
    print("sqrt17/6 =", mp.nstr(mp.sqrt(17) / 6, 17))
