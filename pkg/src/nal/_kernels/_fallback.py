"""Numpy implementation of the numerical kernels.

The compiled module ``nal._kernels._core`` mirrors these signatures; the
package picks one at import time.  Keep the two in sync: the parity tests
compare them on random inputs.
"""
import numpy as np

__all__ = ["gauge_max_abs", "orbit_grid", "plateau_poly", "plateau_dirs"]


def gauge_max_abs(duals, pts):
    """Evaluate a polygonal gauge max_l |<d_l, x>| at a batch of points.

    Parameters
    ----------
    duals : (m, 2) array
        Dual vertices (support functionals) of the half-list.
    pts : (k, 2) array

    Returns
    -------
    (k,) array
    """
    duals = np.ascontiguousarray(duals, dtype=np.float64)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    return np.abs(pts @ duals.T).max(axis=1)


def _sector_antiderivative(alpha, beta, theta):
    # d/dtheta of this is (alpha*cos(theta) + beta*sin(theta))**2
    s2 = np.sin(2.0 * theta)
    c2 = np.cos(2.0 * theta)
    return (
        0.5 * (alpha * alpha + beta * beta) * theta
        + 0.25 * (alpha * alpha - beta * beta) * s2
        - 0.5 * alpha * beta * c2
    )


def orbit_grid(prims, duals, thetas, lams):
    """Exact circle-average and sup energies of a polygon gauge composed
    with T = R(theta) @ diag(lam, 1/lam), for a batch of (theta, lam).

    ``prims`` is the canonical half-list of ball vertices, ``duals[j]`` the
    support functional active on the sector from prims[j] to prims[j+1]
    (wrapping to -prims[0]).

    Returns
    -------
    (G, 2) array
        Column 0 the circle-average energy, column 1 the sup energy.
    """
    prims = np.asarray(prims, dtype=np.float64)
    duals = np.asarray(duals, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    lams = np.asarray(lams, dtype=np.float64)
    ct, st = np.cos(thetas), np.sin(thetas)

    # T^T d = diag(lam, 1/lam) @ R(-theta) @ d
    dx = duals[None, :, 0] * ct[:, None] + duals[None, :, 1] * st[:, None]
    dy = -duals[None, :, 0] * st[:, None] + duals[None, :, 1] * ct[:, None]
    dx = dx * lams[:, None]
    dy = dy / lams[:, None]
    iplus = (dx * dx + dy * dy).max(axis=1)

    # T^-1 w = diag(1/lam, lam) @ R(-theta) @ w
    px = prims[None, :, 0] * ct[:, None] + prims[None, :, 1] * st[:, None]
    py = -prims[None, :, 0] * st[:, None] + prims[None, :, 1] * ct[:, None]
    px = px / lams[:, None]
    py = py * lams[:, None]

    ang = np.arctan2(py, px)
    nxt = np.roll(ang, -1, axis=1)
    nxt[:, -1] += np.pi  # wrap sector ends at -prims[0]
    width = np.mod(nxt - ang, 2.0 * np.pi)
    i2 = (2.0 / np.pi) * (
        _sector_antiderivative(dx, dy, ang + width)
        - _sector_antiderivative(dx, dy, ang)
    ).sum(axis=1)
    return np.stack([i2, iplus], axis=1)


def _smooth_sup_sq(r, p, axis):
    """(sum r^p)^(2/p) with max-normalization, plus the gradient factor.

    Returns (value, u) where u = r / (sum r^p)^(1/p); the derivative of the
    value w.r.t. r is 2 * u**(p-2) * r.
    """
    rmax = r.max(axis=axis, keepdims=True)
    rmax = np.where(rmax > 0.0, rmax, 1.0)
    s = ((r / rmax) ** p).sum(axis=axis, keepdims=True)
    m = rmax * s ** (1.0 / p)
    u = r / m
    val = np.squeeze(m, axis=axis) ** 2
    return val, u


def plateau_poly(Y, tris, ginv, warea, funcs, dirs, p, a_ks, b_resh, c_det, det_eps):
    """Smoothed energy and gradient of a piecewise-linear disc map into a
    polyhedral-gauge target N(y) = max_l |<funcs[l], y>|.

    Per triangle the objective is
        a_ks * circle-average + b_resh * sup + c_det * sqrt(det^2 + eps^2)
    with both max-type terms smoothed by the p-norm; the det term requires a
    planar target.  Returns (energy, grad) with grad shaped like Y.
    """
    Y = np.asarray(Y, dtype=np.float64)
    tris = np.asarray(tris)
    i, j, k = tris[:, 0], tris[:, 1], tris[:, 2]
    F = np.stack([Y[j] - Y[i], Y[k] - Y[i]], axis=2)  # (T, n, 2)
    Du = F @ ginv  # (T, n, 2)
    B = np.einsum("ln,tnk->tlk", funcs, Du)  # (T, m, 2)
    w = warea

    energy = 0.0
    dB = np.zeros_like(B)
    dDu = None

    if b_resh != 0.0:
        r = np.sqrt((B * B).sum(axis=2))  # (T, m)
        val, u = _smooth_sup_sq(r, p, axis=1)
        energy += b_resh * float((w * val).sum())
        dB += (b_resh * 2.0 * w[:, None] * u ** (p - 2.0))[:, :, None] * B

    if a_ks != 0.0:
        K = dirs.shape[0]
        C = np.einsum("tlk,qk->tlq", B, dirs)  # (T, m, K)
        val, u = _smooth_sup_sq(np.abs(C), p, axis=1)  # val (T,K), u (T,m,K)
        energy += a_ks * (2.0 / K) * float((w[:, None] * val).sum())
        dC = (a_ks * (2.0 / K) * 2.0) * w[:, None, None] * u ** (p - 2.0) * C
        dB += np.einsum("tlq,qk->tlk", dC, dirs)

    dDu = np.einsum("ln,tlk->tnk", funcs, dB)

    if c_det != 0.0:
        if Y.shape[1] != 2:
            raise ValueError("determinant term requires a planar target")
        det = Du[:, 0, 0] * Du[:, 1, 1] - Du[:, 0, 1] * Du[:, 1, 0]
        soft = np.sqrt(det * det + det_eps * det_eps)
        energy += c_det * float((w * soft).sum())
        coef = c_det * w * det / soft
        dDu[:, 0, 0] += coef * Du[:, 1, 1]
        dDu[:, 1, 1] += coef * Du[:, 0, 0]
        dDu[:, 0, 1] -= coef * Du[:, 1, 0]
        dDu[:, 1, 0] -= coef * Du[:, 0, 1]

    dF = dDu @ np.transpose(ginv, (0, 2, 1))  # (T, n, 2)
    grad = np.zeros_like(Y)
    np.add.at(grad, j, dF[:, :, 0])
    np.add.at(grad, k, dF[:, :, 1])
    np.add.at(grad, i, -dF[:, :, 0] - dF[:, :, 1])
    return energy, grad


def plateau_dirs(Y, tris, ginv, warea, dirs, p, a_ks, b_resh, c_det, det_eps,
                 target_kind, target_p=2.0):
    """Direction-sampled smoothed energy for euclid / lp targets.

    s(v_q) = N(Du v_q) is evaluated exactly per sampled direction; the sup
    energy smooths the max over directions with the p-norm, the circle
    average uses the trapezoid rule (exact for the euclid case).
    """
    Y = np.asarray(Y, dtype=np.float64)
    tris = np.asarray(tris)
    i, j, k = tris[:, 0], tris[:, 1], tris[:, 2]
    F = np.stack([Y[j] - Y[i], Y[k] - Y[i]], axis=2)
    Du = F @ ginv  # (T, n, 2)
    V = np.einsum("tnk,qk->tnq", Du, dirs)  # (T, n, K)
    w = warea
    K = dirs.shape[0]

    if target_kind == "euclid":
        s = np.sqrt((V * V).sum(axis=1))  # (T, K)
        # dV = ds/dV * upstream, handled via V/s factor below
        def back(ds):
            with np.errstate(invalid="ignore"):
                fac = np.where(s > 0.0, ds / np.where(s > 0.0, s, 1.0), 0.0)
            return V * fac[:, None, :]
    elif target_kind == "lp":
        q = target_p
        aV = np.abs(V)
        vmax = aV.max(axis=1, keepdims=True)
        vmax = np.where(vmax > 0.0, vmax, 1.0)
        ssum = ((aV / vmax) ** q).sum(axis=1, keepdims=True)
        s = np.squeeze(vmax * ssum ** (1.0 / q), axis=1)  # (T, K)

        def back(ds):
            m = vmax * ssum ** (1.0 / q)
            u = aV / m
            return u ** (q - 1.0) * np.sign(V) * ds[:, None, :]
    else:
        raise ValueError(f"unknown target kind {target_kind!r}")

    energy = 0.0
    dS = np.zeros_like(s)
    if a_ks != 0.0:
        energy += a_ks * (2.0 / K) * float((w[:, None] * s * s).sum())
        dS += a_ks * (2.0 / K) * 2.0 * w[:, None] * s
    if b_resh != 0.0:
        val, u = _smooth_sup_sq(s, p, axis=1)
        energy += b_resh * float((w * val).sum())
        dS += b_resh * 2.0 * w[:, None] * u ** (p - 2.0) * s

    dV = back(dS)
    dDu = np.einsum("tnq,qk->tnk", dV, dirs)

    if c_det != 0.0:
        if Y.shape[1] != 2:
            raise ValueError("determinant term requires a planar target")
        det = Du[:, 0, 0] * Du[:, 1, 1] - Du[:, 0, 1] * Du[:, 1, 0]
        soft = np.sqrt(det * det + det_eps * det_eps)
        energy += c_det * float((w * soft).sum())
        coef = c_det * w * det / soft
        dDu[:, 0, 0] += coef * Du[:, 1, 1]
        dDu[:, 1, 1] += coef * Du[:, 0, 0]
        dDu[:, 0, 1] -= coef * Du[:, 1, 0]
        dDu[:, 1, 0] -= coef * Du[:, 0, 1]

    dF = dDu @ np.transpose(ginv, (0, 2, 1))
    grad = np.zeros_like(Y)
    np.add.at(grad, j, dF[:, :, 0])
    np.add.at(grad, k, dF[:, :, 1])
    np.add.at(grad, i, -dF[:, :, 0] - dF[:, :, 1])
    return energy, grad
