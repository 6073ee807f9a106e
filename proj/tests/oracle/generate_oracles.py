# Independent high-precision values frozen in the C++ tests.
# Requires mpmath. Prints lambda1, the Rayleigh quotient of its closed-form
# eigenfunction, the hanger constants and the lowest even eigenvalues for
# m = 1, 2, 3 at sigma = 0.2, ell = pi/200, eps = pi/1500.

import mpmath as mp
mp.mp.dps = 40
sigma = mp.mpf('0.2'); ell = mp.pi/200; eps = mp.pi/1500
def F(lam):
    r = mp.sqrt(lam)
    return mp.sqrt(1-r)*(r+1-sigma)**2*mp.tanh(ell*mp.sqrt(1-r)) - mp.sqrt(1+r)*(r-1+sigma)**2*mp.tanh(ell*mp.sqrt(1+r))
l1 = mp.findroot(F, (mp.mpf('0.959'), mp.mpf('0.961')), solver='anderson')
print('lambda1', mp.nstr(l1, 25))
r = mp.sqrt(l1); g = mp.sqrt(1-r); b = mp.sqrt(1+r)
h  = lambda y: (r+1-sigma)*mp.cosh(g*y)/mp.cosh(g*ell) + (r-1+sigma)*mp.cosh(b*y)/mp.cosh(b*ell)
h1 = lambda y: (r+1-sigma)*g*mp.sinh(g*y)/mp.cosh(g*ell) + (r-1+sigma)*b*mp.sinh(b*y)/mp.cosh(b*ell)
h2 = lambda y: (r+1-sigma)*g**2*mp.cosh(g*y)/mp.cosh(g*ell) + (r-1+sigma)*b**2*mp.cosh(b*y)/mp.cosh(b*ell)
m = 1
star = mp.pi/2*mp.quad(lambda y: h2(y)**2 - 2*sigma*m**2*h(y)*h2(y) + m**4*h(y)**2 + 2*(1-sigma)*m**2*h1(y)**2, [-ell, ell])
dx = mp.pi/2*mp.quad(lambda y: h(y)**2, [-ell, ell])
print('rayleigh', mp.nstr(star/dx, 25))
alpha = 2*mp.pi/2*mp.quad(lambda y: h(y)**2, [ell-eps, ell])/star
q4 = 2*mp.quad(lambda x: mp.sin(x)**4, [0, mp.pi])*mp.quad(lambda y: h(y)**4, [ell-eps, ell])/star**2
print('alpha', mp.nstr(alpha, 20))
print('int Y e1^4', mp.nstr(q4, 20))
print('lambda_bar(k=0.1)', mp.nstr((alpha*mp.mpf('0.1')+1)*l1, 20))
print('lambda_bar(k=5)', mp.nstr((alpha*5+1)*l1, 20))
def det_even(lam, m):
    s = mp.sqrt(lam)
    b = mp.sqrt(m*m + m*s); g = mp.sqrt(m*m - m*s)
    return ((b**2 - sigma*m**2)*mp.cosh(b*ell)*(g**3 - (2-sigma)*m**2*g)*mp.sinh(g*ell)
            - (g**2 - sigma*m**2)*mp.cosh(g*ell)*(b**3 - (2-sigma)*m**2*b)*mp.sinh(b*ell))
for m in (1, 2, 3):
    lo = (1-sigma)**2*m*m*mp.mpf('1.0000001'); hi = m*m*(1-mp.mpf('1e-12'))
    # bracket the root by a dense scan, then bisect
    xs = [lo + (hi-lo)*i/4000 for i in range(4001)]
    for a, c in zip(xs, xs[1:]):
        if mp.sign(det_even(a, m)) != mp.sign(det_even(c, m)):
            print('m', m, mp.nstr(mp.findroot(lambda t: det_even(t, m), (a, c), solver='bisect'), 22))
