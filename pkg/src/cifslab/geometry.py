"""Disc geometry of the generators and rendering of the limit sets.

Both f_a(z) = (z + conj(a))/(|a|^2 - 1) and g_a(z) = 1/(z + a) map the closed
unit disc onto the same disc, and map discs to discs in general, so finite
approximations of J are unions of exactly computed discs.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .digits import SystemSpec


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def contains(self, other: "Disc", slack: float = 1e-12) -> bool:
        return abs(other.center - self.center) + other.radius <= self.radius + slack


UNIT = Disc(0j, 1.0)


def generator_disc(alpha: complex) -> Disc:
    alpha = complex(alpha)
    # rotated digits of modulus 2 can round a hair below it
    if abs(alpha) < 2.0 - 1e-12:
        raise ValueError("|alpha| must be >= 2")
    m = abs(alpha) ** 2 - 1.0
    return Disc(alpha.conjugate() / m, 1.0 / m)


def affine_image(alpha: complex, d: Disc) -> Disc:
    alpha = complex(alpha)
    m = abs(alpha) ** 2 - 1.0
    return Disc((d.center + alpha.conjugate()) / m, d.radius / m)


def mobius_image(alpha: complex, d: Disc) -> Disc:
    """Image of d under z -> 1/(z + alpha): translate, then invert."""
    c = d.center + complex(alpha)
    den = abs(c) ** 2 - d.radius**2
    if den <= 0:
        raise ValueError("disc contains the pole -alpha")
    return Disc(c.conjugate() / den, d.radius / den)


def image(spec: SystemSpec, alpha: complex, d: Disc) -> Disc:
    return affine_image(alpha, d) if spec.family == "F" else mobius_image(alpha, d)


def word_disc(spec: SystemSpec, alphas) -> Disc:
    """s_{a_1} o ... o s_{a_N}(closed unit disc)."""
    alphas = list(alphas)
    d = generator_disc(alphas[-1])
    for a in reversed(alphas[:-1]):
        d = image(spec, a, d)
    return d


def generator_matrices(spec: SystemSpec, alpha) -> np.ndarray:
    """2x2 matrices [[a, b], [c, d]] of the generators, z -> (az + b)/(cz + d)."""
    alpha = np.asarray(alpha, dtype=complex)
    mats = np.zeros((alpha.size, 2, 2), dtype=complex)
    if spec.family == "F":
        mats[:, 0, 0] = 1.0
        mats[:, 0, 1] = np.conj(alpha)
        mats[:, 1, 1] = np.abs(alpha) ** 2 - 1.0
    else:
        mats[:, 0, 1] = 1.0
        mats[:, 1, 0] = 1.0
        mats[:, 1, 1] = alpha
    return mats


def unit_disc_images(mats: np.ndarray):
    """Centres and radii of M(closed unit disc) for a stack of matrices with |d| > |c|."""
    return disc_images(mats, np.zeros(1, complex), np.ones(1))


def disc_images(mats: np.ndarray, c0, r0, det=None):
    """Images of discs B(c0, r0) under matrices; mats and (c0, r0) broadcast.

    Mapping a small disc keeps |cz0 + d|^2 - |c|^2 r0^2 clear of cancellation,
    which deep words applied to the whole unit disc do not. Products of many
    generators should pass `det` tracked separately, since ad - bc cancels.
    """
    a, b, c, d = mats[..., 0, 0], mats[..., 0, 1], mats[..., 1, 0], mats[..., 1, 1]
    if det is None:
        det = a * d - b * c
    w = c * c0 + d
    cr2 = np.abs(c) ** 2 * r0**2
    den = np.abs(w) ** 2 - cr2
    center = ((a * c0 + b) * np.conj(w) - a * np.conj(c) * r0**2) / den
    return center, np.abs(det) * r0 / den


# ---------------------------------------------------------------- OSC


@dataclass(frozen=True)
class OscReport:
    disjoint: bool
    overlaps: tuple  # index pairs (n, j), (n', j') with overlapping interiors
    tangencies: tuple
    half_angle: float
    sector: float  # pi / T
    cone_ok: bool


def osc_report(spec: SystemSpec, K: int = 10, tol: float = 1e-12) -> OscReport:
    """Pairwise interior-disjointness and tangency of the K*T level-1 discs."""
    T = spec.T
    discs = []
    for n in range(1, K + 1):
        for j in range(T):
            a = spec.digits.digit(n) * complex(math.cos(2 * math.pi * j / T), math.sin(2 * math.pi * j / T))
            discs.append(((n, j), generator_disc(a)))
    overlaps, tangent = [], []
    for (ia, da), (ib, db) in combinations(discs, 2):
        gap = abs(da.center - db.center) - (da.radius + db.radius)
        if gap < -tol:
            overlaps.append((ia, ib))
        elif gap <= tol:
            tangent.append((ia, ib))
    d1 = spec.digits.digit(1)
    half = math.asin(1.0 / d1)
    return OscReport(not overlaps, tuple(overlaps), tuple(tangent), half, math.pi / T,
                     half <= math.pi / T * (1 + 1e-12))


# ---------------------------------------------------------------- render


@dataclass
class DiscTree:
    centers: np.ndarray
    radii: np.ndarray
    depth: np.ndarray
    words: list  # tuple of (n, j) letters per leaf, or None when not tracked


def disc_tree(spec: SystemSpec, depth: int, min_radius: float = 0.0, K: int = 200, track_words: bool = False) -> DiscTree:
    """Leaf discs of the depth-limited word tree.

    A branch stops when it reaches `depth` or its disc radius falls below
    min_radius; its current disc s_w(D) is then a leaf. The leaves form a cut
    of the prefix tree, so their union contains J. Leaves come out grouped by
    level, and within a level in lexicographic order of their words.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    alpha = spec.alphabet(K)
    labels = [(n, j) for n in range(1, K + 1) for j in range(spec.T)]
    gens = generator_matrices(spec, alpha)
    # level 1 straight from the closed form, identical for both families
    gd = [generator_disc(a) for a in alpha]
    c = np.array([g.center for g in gd], dtype=complex)
    r = np.array([g.radius for g in gd])
    c1, r1 = c, r
    mats = gens.copy()
    gdet = gens[:, 0, 0] * gens[:, 1, 1] - gens[:, 0, 1] * gens[:, 1, 0]
    dets = gdet.copy()
    w = [(lab,) for lab in labels] if track_words else None
    leaves_c, leaves_r, leaves_d, leaves_w = [], [], [], []
    level = 1
    while True:
        stop = r < min_radius if level < depth else np.ones(r.shape, bool)
        leaves_c.append(c[stop])
        leaves_r.append(r[stop])
        leaves_d.append(np.full(int(stop.sum()), level))
        if track_words:
            leaves_w.extend(x for x, s in zip(w, stop) if s)
        go = ~stop
        if not go.any():
            break
        parents, pdet = mats[go], dets[go]
        # child w.a is s_w applied to the level-1 disc of a
        c, r = disc_images(parents[:, None], c1[None, :], r1[None, :], pdet[:, None])
        c, r = c.ravel(), r.ravel()
        mats = np.matmul(parents[:, None], gens[None, :]).reshape(-1, 2, 2)
        dets = (pdet[:, None] * gdet[None, :]).ravel()
        # projective normalisation keeps entries bounded at depth
        scale = np.abs(mats).max(axis=(1, 2))
        mats /= scale[:, None, None]
        dets /= scale**2
        if track_words:
            w = [x + (lab,) for x, g in zip(w, go) if g for lab in labels]
        level += 1
    return DiscTree(np.concatenate(leaves_c), np.concatenate(leaves_r), np.concatenate(leaves_d),
                    leaves_w if track_words else None)


def rasterize(centers, radii, width: int, height: int, ss: int = 2) -> np.ndarray:
    """Fraction of ss x ss subsamples per pixel covered by any disc, over [-1,1]^2."""
    if width < 1 or height < 1:
        raise ValueError("image needs a positive pixel area")
    W, H = width * ss, height * ss
    hit = np.zeros((H, W), dtype=bool)
    sx, sy = 2.0 / W, 2.0 / H
    # sample (i, k) sits at x = -1 + (k + 1/2) sx, y = 1 - (i + 1/2) sy
    cx, cy = centers.real, centers.imag
    k0 = np.clip(np.ceil((cx - radii + 1) / sx - 0.5), 0, W).astype(np.int64)
    k1 = np.clip(np.floor((cx + radii + 1) / sx - 0.5), -1, W - 1).astype(np.int64)
    i0 = np.clip(np.ceil((1 - cy - radii) / sy - 0.5), 0, H).astype(np.int64)
    i1 = np.clip(np.floor((1 - cy + radii) / sy - 0.5), -1, H - 1).astype(np.int64)
    span = np.maximum(k1 - k0 + 1, i1 - i0 + 1)
    live = (k1 >= k0) & (i1 >= i0)
    # small discs in bulk through a fixed window, large ones one by one
    small = live & (span <= 4)
    if small.any():
        idx = np.nonzero(small)[0]
        off = np.arange(4)
        kk, ii = np.broadcast_arrays(k0[idx, None, None] + off[None, None, :],
                                     i0[idx, None, None] + off[None, :, None])
        xs = -1 + (kk + 0.5) * sx
        ys = 1 - (ii + 0.5) * sy
        inside = ((xs - cx[idx, None, None]) ** 2 + (ys - cy[idx, None, None]) ** 2 <= radii[idx, None, None] ** 2)
        inside &= (kk <= k1[idx, None, None]) & (ii <= i1[idx, None, None])
        hit[ii[inside], kk[inside]] = True
    for q in np.nonzero(live & ~small)[0]:
        ks = np.arange(k0[q], k1[q] + 1)
        is_ = np.arange(i0[q], i1[q] + 1)
        xs = -1 + (ks + 0.5) * sx
        ys = 1 - (is_ + 0.5) * sy
        m = (xs[None, :] - cx[q]) ** 2 + (ys[:, None] - cy[q]) ** 2 <= radii[q] ** 2
        hit[i0[q]:i1[q] + 1, k0[q]:k1[q] + 1] |= m
    return hit.reshape(height, ss, width, ss).mean(axis=(1, 3))


def to_rgb(coverage: np.ndarray, ink=None) -> np.ndarray:
    """Solid ink on white; `ink` (0..1, per pixel) darkens covered area, default black."""
    ink = 1.0 if ink is None else ink
    g = np.rint(255.0 * (1.0 - coverage * ink)).astype(np.uint8)
    return np.repeat(g[:, :, None], 3, axis=2)


def write_ppm(path, rgb: np.ndarray):
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def adaptive_depth(spec: SystemSpec, width: int, K: int, cap: int = 12) -> int:
    """Smallest depth whose largest disc is below half a pixel, capped."""
    half_px = 1.0 / width
    rmax = generator_disc(spec.alphabet(1)[0]).radius
    # radii contract at least by the largest level-1 radius per level
    depth = 1
    r = rmax
    while r >= half_px and depth < cap:
        depth += 1
        r *= rmax if spec.family == "F" else 1.0 / (spec.digits.digit(1) - 1.0) ** 2
    return depth


def render(
    spec: SystemSpec,
    out,
    depth: int = None,
    min_radius: float = None,
    K: int = 200,
    width: int = 512,
    height: int = 512,
    png: str = None,
    metadata: str = None,
    ss: int = 2,
    shade_depth: bool = False,
) -> dict:
    """Paint the leaf discs of the depth-limited tree to a binary PPM (and optional PNG)."""
    if min_radius is None:
        min_radius = 1.0 / max(width, height)  # half a pixel on [-1, 1]
    if depth is None:
        depth = adaptive_depth(spec, max(width, height), K)
    tree = disc_tree(spec, depth, min_radius, K, track_words=metadata is not None)
    cov = rasterize(tree.centers, tree.radii, width, height, ss)
    ink = None
    if shade_depth:
        # deeper leaves lighter: paint shallow-to-deep, last level wins
        ink = np.zeros((height, width))
        for lv in range(1, int(tree.depth.max()) + 1):
            sel = tree.depth == lv
            part = rasterize(tree.centers[sel], tree.radii[sel], width, height, ss)
            ink = np.where(part > 0, 1.0 - 0.6 * (lv - 1) / max(depth - 1, 1), ink)
    rgb = to_rgb(cov, ink)
    write_ppm(out, rgb)
    if png:
        from PIL import Image

        Image.fromarray(rgb, "RGB").save(png)
    if metadata:
        with open(metadata, "w") as fh:
            for wd, c, r in zip(tree.words, tree.centers, tree.radii):
                word = " ".join(f"{n}:{j}" for n, j in wd)
                fh.write(f"{word}\t{float(c.real)!r}\t{float(c.imag)!r}\t{float(r)!r}\n")
    return {"discs": int(tree.radii.size), "depth": depth, "min_radius": min_radius, "K": K,
            "width": width, "height": height}
