"""Independent NumPy evaluation of the structure and enhanced-alignment
measures on the 4x4 fixtures used by the C++ tests. Run it to regenerate the
frozen constants in tests/unit/metrics_test.cpp and the acceptance suite."""
import numpy as np

EPS = np.finfo(np.float64).eps

GT = np.array([[0, 1, 1, 0],
               [1, 1, 1, 0],
               [0, 1, 0, 0],
               [0, 0, 0, 0]], dtype=np.float64)
PRED = np.array([[0.9, 0.8, 0.1, 0.0],
                 [0.7, 0.6, 0.2, 0.1],
                 [0.1, 0.0, 0.3, 0.0],
                 [0.0, 0.2, 0.0, 0.1]], dtype=np.float32).astype(np.float64)


def obj(x):
    if x.size == 0:
        return 0.0
    mu = x.mean()
    sd = x.std(ddof=1) if x.size > 1 else 0.0
    return 2 * mu / (mu * mu + 1 + sd + EPS)


def s_object(p, g):
    g = g > 0.5
    u = g.mean()
    return u * obj(p[g]) + (1 - u) * obj(1 - p[~g])


def ssim(p, g):
    n = p.size
    if n == 0:
        return 0.0
    x, y = p.mean(), g.mean()
    sx = ((p - x) ** 2).sum() / (n - 1 + EPS)
    sy = ((g - y) ** 2).sum() / (n - 1 + EPS)
    sxy = ((p - x) * (g - y)).sum() / (n - 1 + EPS)
    a = 4 * x * y * sxy
    b = (x * x + y * y) * (sx + sy)
    if a != 0:
        return a / (b + EPS)
    return 1.0 if b == 0 else 0.0


def mround(v):
    return int(np.floor(v + 0.5))


def s_region(p, g):
    h, w = g.shape
    tot = g.sum()
    if tot == 0:
        X, Y = mround(w / 2), mround(h / 2)
    else:
        X = mround((g.sum(axis=0) * np.arange(1, w + 1)).sum() / tot)
        Y = mround((g.sum(axis=1) * np.arange(1, h + 1)).sum() / tot)
    area = w * h
    w1 = X * Y / area
    w2 = (w - X) * Y / area
    w3 = X * (h - Y) / area
    w4 = 1 - w1 - w2 - w3
    return (w1 * ssim(p[:Y, :X], g[:Y, :X]) + w2 * ssim(p[:Y, X:], g[:Y, X:]) +
            w3 * ssim(p[Y:, :X], g[Y:, :X]) + w4 * ssim(p[Y:, X:], g[Y:, X:]))


def s_measure(p, g, alpha=0.5):
    y = (g > 0.5).mean()
    if y == 0:
        return 1 - p.mean()
    if y == 1:
        return p.mean()
    return max(0.0, alpha * s_object(p, g) + (1 - alpha) * s_region(p, g))


def enhanced(fm, g):
    fm = fm.astype(np.float64)
    g = (g > 0.5).astype(np.float64)
    if g.sum() == 0:
        e = 1 - fm
    elif (1 - g).sum() == 0:
        e = fm
    else:
        a = fm - fm.mean()
        b = g - g.mean()
        al = 2 * a * b / (a * a + b * b + EPS)
        e = (al + 1) ** 2 / 4
    return e.sum() / g.size


def e_modes(p, g, levels=256):
    t = min(2 * p.mean(), 1.0)
    adp = enhanced(p >= t, g)
    vals = [enhanced(p > k / levels, g) for k in range(levels)]
    return adp, float(np.mean(vals)), float(np.max(vals))


if __name__ == "__main__":
    np.set_printoptions(precision=12)
    print("S(pred)          = %.10f" % s_measure(PRED, GT))
    print("S_object(pred)   = %.10f" % s_object(PRED, GT))
    print("S_region(pred)   = %.10f" % s_region(PRED, GT))
    print("S(gt)            = %.10f" % s_measure(GT, GT))
    print("S(zero gt, 0.3)  = %.10f" % s_measure(np.full((4, 4), 0.3, dtype=np.float32).astype(np.float64), np.zeros((4, 4))))
    adp, mean, mx = e_modes(PRED, GT)
    print("E adp/mean/max   = %.10f %.10f %.10f" % (adp, mean, mx))
    print("E(complement)    = %.10f" % enhanced(GT < 0.5, GT))
    c = np.full((4, 4), GT.mean())
    print("E adp(constant)  = %.10f" % e_modes(c, GT)[0])
    print("E(gt)            = %.10f %.10f %.10f" % e_modes(GT, GT))
