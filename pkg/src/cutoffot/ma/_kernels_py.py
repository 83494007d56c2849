"""NumPy implementations of the scheme kernels (fallback when the extension is absent)."""
import numpy as np


def second_differences(u, pidx, pw, plen, midx, mw, mlen, u0):
    """Directional second differences, shape (D, M)."""
    up = pw[..., 0] * u[pidx[..., 0]] + pw[..., 1] * u[pidx[..., 1]]
    um = mw[..., 0] * u[midx[..., 0]] + mw[..., 1] * u[midx[..., 1]]
    return 2.0 / (plen + mlen) * ((up - u0) / plen + (um - u0) / mlen)


def interior_residual(u, nodes, pidx, pw, plen, midx, mw, mlen, pairs, f0, f1, delta):
    """Residual, active branch and second differences at interior nodes.

    Branch b >= 0 is the minimizing orthogonal pair of the determinant term;
    b < 0 encodes the eigenvalue term through direction -(b + 1).
    """
    dd = second_differences(u, pidx, pw, plen, midx, mw, mlen, u[nodes])
    pos = np.maximum(dd, 0.0)
    prods = pos[pairs[:, 0]] * pos[pairs[:, 1]]
    kp = np.argmin(prods, axis=0)
    det = prods[kp, np.arange(prods.shape[1])]
    kd = np.argmin(dd, axis=0)
    lam = dd[kd, np.arange(dd.shape[1])]
    ma = -f1 * det + f0
    use_ma = ma >= -lam
    res = np.where(use_ma, ma, -lam) - delta
    branch = np.where(use_ma, kp, -(kd + 1))
    return res, branch.astype(np.intp), dd


def boundary_residual(u, bnodes, nbrs, normals, sigma, h, delta):
    """max over admissible normals of sum_i |n_i| (u(x) - u(upwind_i)) / h - sigma(n)."""
    B = len(bnodes)
    u0 = u[bnodes]
    best = np.full(B, -np.inf)
    arg = np.full(B, -1, dtype=np.intp)
    for k in range(len(normals)):
        n = normals[k]
        val = -sigma[k] * np.ones(B)
        ok = np.ones(B, dtype=bool)
        for i in range(2):
            if n[i] == 0.0:
                continue
            side = 0 if n[i] > 0 else 1
            nb = nbrs[:, i, side]
            ok &= nb >= 0
            val = val + abs(n[i]) * (u0 - u[np.where(nb >= 0, nb, 0)]) / h
        better = ok & (val > best)
        best = np.where(better, val, best)
        arg = np.where(better, k, arg)
    return best - delta, arg


def lower_hull(x, g):
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (g[b] - g[a]) * (x[i] - x[a]) >= (g[i] - g[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.intp)
