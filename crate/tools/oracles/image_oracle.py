"""PSNR, SSIM and low-level features on the procedural fixture images.

The fixture formulas mirror `fixture_image` and `perturbed` in the Rust tests.
SSIM uses scikit-image on BT.601 luma with the Gaussian-window settings.
"""
import numpy as np
from skimage.metrics import structural_similarity

W, H = 48, 40


def fixture_image(k):
    y, x = np.mgrid[0:H, 0:W].astype(np.int64)
    r = (x * 3 + y * 5 + k * 40) % 256
    g = (x * y + 17 * k) % 256
    b = ((x ^ y) * 2 + k * 7) % 256
    return np.stack([r, g, b], axis=-1).astype(np.float64)


def perturbed(img):
    y, x = np.mgrid[0:H, 0:W].astype(np.int64)
    off = ((x * 31 + y * 17) % 41) - 20
    return np.clip(img + off[..., None], 0, 255)


def luma(img):
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def psnr(a, b):
    mse = np.mean((a - b) ** 2)
    return 100.0 if mse == 0 else min(100.0, 10 * np.log10(255.0 ** 2 / mse))


def ssim(a, b):
    return structural_similarity(luma(a), luma(b), data_range=255, gaussian_weights=True, sigma=1.5,
                                 use_sample_covariance=False)


def conv(p, taps):
    pad = np.pad(p, 1, mode="edge")
    out = np.zeros_like(p)
    for dx, dy, w in taps:
        out += w * pad[1 + dy:1 + dy + p.shape[0], 1 + dx:1 + dx + p.shape[1]]
    return out


def features(img):
    yl = luma(img)
    cb = (img[..., 2] - yl) / (2 * (1 - 0.114))
    cr = (img[..., 0] - yl) / (2 * (1 - 0.299))
    lap = conv(yl / 255.0, [(0, 0, -4), (-1, 0, 1), (1, 0, 1), (0, -1, 1), (0, 1, 1)])
    gx = conv(yl, [(-1, -1, -1), (1, -1, 1), (-1, 0, -2), (1, 0, 2), (-1, 1, -1), (1, 1, 1)])
    gy = conv(yl, [(-1, -1, -1), (0, -1, -2), (1, -1, -1), (-1, 1, 1), (0, 1, 2), (1, 1, 1)])
    return [yl.mean(), yl.std(), np.sqrt(cb ** 2 + cr ** 2).mean(), lap.var(), np.hypot(gx, gy).std()]


for k in range(3):
    a = fixture_image(k)
    b = perturbed(a)
    inv = 255 - a
    print(f"    // image {k}")
    print(f"    psnr {psnr(a, b)!r} ssim {ssim(a, b)!r} ssim_inverted {ssim(a, inv)!r}")
    print(f"    features {[float(v) for v in features(a)]!r}")
