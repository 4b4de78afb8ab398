"""Pure-Python GF(2) kernels.  Same interface as the compiled ``_kernels``."""

import numpy as np


def _row_int(words) -> int:
    return int.from_bytes(np.asarray(words, dtype="<u8").tobytes(), "little")


def gf2_solve_packed(aug, ncols: int):
    """Solve A x = b given rows of [A | b] packed little-endian into uint64 words.

    Bit ``ncols`` of each row holds b.  Returns a uint8 vector or None.
    """
    rows = [_row_int(r) for r in aug]
    bbit = 1 << ncols
    pivots = []
    r = 0
    for c in range(ncols):
        mask = 1 << c
        p = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= pr
        pivots.append(c)
        r += 1
    if any(row == bbit for row in rows[r:]):
        return None
    x = np.zeros(ncols, dtype=np.uint8)
    for i, c in enumerate(pivots):
        x[c] = (rows[i] >> ncols) & 1
    return x


def column_residual(d, tin_ptr, tin_idx, n: int):
    """r = (I - T) d over GF(2), with T given column-wise in CSR form.

    ``tin_idx[tin_ptr[y]:tin_ptr[y+1]]`` lists the rows x with T[x, y] = 1.
    """
    r = np.zeros(n, dtype=np.uint8)
    ptr = tin_ptr.tolist() if hasattr(tin_ptr, "tolist") else tin_ptr
    idx = tin_idx.tolist() if hasattr(tin_idx, "tolist") else tin_idx
    buf = bytearray(n)
    for y in (d.tolist() if hasattr(d, "tolist") else d):
        buf[y] ^= 1
        for k in range(ptr[y], ptr[y + 1]):
            buf[idx[k]] ^= 1
    r[:] = np.frombuffer(bytes(buf), dtype=np.uint8)
    return r
