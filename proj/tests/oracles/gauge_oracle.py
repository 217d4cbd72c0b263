"""Independent mpmath oracle for gauge-ball quantities in the first Heisenberg group.

  |B_rho(0,1)|               = pi^2/2 (closed form) checked by quadrature
  P(1) = |∂B_rho(0,1)|_H     = 2 pi int_0^1 s^2 sqrt(15 s^4 + 1)/sqrt(1 - s^4) ds
  Var_H(1 - rho^4; B_rho)    = 2 pi int_0^1 int_{|t|<sqrt(1-s^4)} s^2 sqrt(16 s^4 + t^2) dt ds
  coarea right side          = P(1) * int_0^1 (1 - tau)^(3/4) dtau = 4/7 P(1)
"""
import mpmath as mp

mp.mp.dps = 30
vol = 2 * mp.pi * mp.quad(lambda s: s * 2 * mp.sqrt(1 - s ** 4), [0, 1])
P1 = 2 * mp.pi * mp.quad(lambda s: s ** 2 * mp.sqrt(15 * s ** 4 + 1) / mp.sqrt(1 - s ** 4), [0, 1])
lhs = 2 * mp.pi * mp.quad(
    lambda s: mp.quad(lambda t: s * s * mp.sqrt(16 * s ** 4 + t * t), [-mp.sqrt(1 - s ** 4), 0, mp.sqrt(1 - s ** 4)]),
    [0, 1])
print("gauge ball volume", mp.nstr(vol, 17), "pi^2/2", mp.nstr(mp.pi ** 2 / 2, 17))
print("gauge sphere perimeter P(1)", mp.nstr(P1, 17))
print("coarea lhs", mp.nstr(lhs, 17), "rhs", mp.nstr(P1 * 4 / 7, 17))
