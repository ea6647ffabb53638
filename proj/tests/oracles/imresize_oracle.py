"""Reference values for the bicubic resampler tests.

Computes MATLAB-imresize-style resampling with numpy (one-based coordinates,
symmetric edge padding, kernel widened by 1/scale when shrinking) and checks the
interior against Pillow's float-mode bicubic filter, which is an unrelated
implementation of the same a=-0.5 kernel. Prints C++ initializers for the
frozen expectations in test_resize.cpp.
"""
import numpy as np
from PIL import Image


def cubic(x):
    a = np.abs(x)
    return np.where(a <= 1, 1.5 * a**3 - 2.5 * a**2 + 1,
                    np.where(a <= 2, -0.5 * a**3 + 2.5 * a**2 - 4 * a + 2, 0.0))


def weights(in_len, out_len, antialias=True):
    scale = out_len / in_len
    if scale < 1 and antialias:
        h = lambda x: scale * cubic(scale * x)
        width = 4.0 / scale
    else:
        h = cubic
        width = 4.0
    x = np.arange(1, out_len + 1, dtype=np.float64)
    u = x / scale + 0.5 * (1 - 1 / scale)
    left = np.floor(u - width / 2)
    p = int(np.ceil(width)) + 2
    idx = left[:, None] + np.arange(p)[None, :]
    w = h(u[:, None] - idx)
    w = w / w.sum(axis=1, keepdims=True)
    aux = np.concatenate([np.arange(1, in_len + 1), np.arange(in_len, 0, -1)])
    idx = aux[np.mod(idx.astype(int) - 1, len(aux))] - 1
    m = np.zeros((out_len, in_len))
    for i in range(out_len):
        for j in range(p):
            m[i, idx[i, j]] += w[i, j]
    return m


def imresize(img, out_rows, out_cols):
    return weights(img.shape[0], out_rows) @ img @ weights(img.shape[1], out_cols).T


def pattern(rows, cols):
    y, x = np.mgrid[0:rows, 0:cols]
    return ((37 * x + 91 * y + 13 * x * y) % 256).astype(np.float64)


def pil(img, out_rows, out_cols):
    im = Image.fromarray(img.astype(np.float32), mode="F")
    return np.asarray(im.resize((out_cols, out_rows), Image.BICUBIC), dtype=np.float64)


def emit(name, m):
    rows = ",\n    ".join("{" + ", ".join(f"{v:.10f}" for v in r) + "}" for r in m)
    print(f"// {name}: {m.shape[0]}x{m.shape[1]}\n{{\n    {rows}\n}}")


if __name__ == "__main__":
    src = pattern(24, 18)
    cases = [("down2", 12, 9, 3), ("down3", 8, 6, 2), ("up2", 48, 36, 3), ("up3", 72, 54, 4)]
    for name, r, c, margin in cases:
        ours = imresize(src, r, c)
        ref = pil(src, r, c)
        inner = (slice(margin, -margin), slice(margin, -margin))
        err = np.abs(ours[inner] - ref[inner]).max()
        print(f"// {name}: max interior deviation from Pillow = {err:.2e}")
        assert err < 1e-3, name
    emit("down2", imresize(src, 12, 9))
    emit("up2 rows 0..3, cols 0..5", imresize(src, 48, 36)[:4, :6])
