"""Independent mpmath oracle for the Poincare and isoperimetric ratios on the unit
gauge ball of the first Heisenberg group (Q = 4, exponent 4/3).

  |B| = pi^2/2
  u = x1:      ||u - 0||_{4/3} = (int_B |x1|^{4/3})^{3/4},  Var_H(u; B) = |B|
  E = {x1<0}:  min(|E cap B|, |E^c cap B|)^{3/4} = (|B|/2)^{3/4}
               |dE|_H(B) = area{(x2, t): x2^4 + t^2 < 1} = 4 int_0^1 sqrt(1 - x^4) dx
"""
import mpmath as mp

mp.mp.dps = 30
B = mp.pi ** 2 / 2
# int_B |x1|^{4/3} = int_0^1 2 sqrt(1-s^4) s^{1+4/3} ds * int_0^{2pi} |cos|^{4/3}
ang = mp.quad(lambda a: abs(mp.cos(a)) ** (mp.mpf(4) / 3), [0, mp.pi / 2, mp.pi, 3 * mp.pi / 2, 2 * mp.pi])
rad = mp.quad(lambda s: 2 * mp.sqrt(1 - s ** 4) * s ** (1 + mp.mpf(4) / 3), [0, 1])
num = (ang * rad) ** (mp.mpf(3) / 4)
print("poincare numerator", mp.nstr(num, 17), "denominator", mp.nstr(B, 17), "ratio", mp.nstr(num / B, 17))
iso_num = (B / 2) ** (mp.mpf(3) / 4)
iso_den = 4 * mp.quad(lambda x: mp.sqrt(1 - x ** 4), [0, 1])
print("isoperimetric numerator", mp.nstr(iso_num, 17), "denominator", mp.nstr(iso_den, 17),
      "ratio", mp.nstr(iso_num / iso_den, 17))
